#pragma once

#include <optional>
#include <string>
#include <vector>

#include "exotendon/config.hpp"
#include "exotendon/errors.hpp"

namespace exo {

enum class Command { MomentArm, SweepA, Compare, ForceCurve, Experiment, Simulate, Calibrate };

const char* to_string(Command c);
std::optional<Command> parse_command(const std::string& name);

/// Process exit codes.
constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;     // solver or geometry failure
constexpr int kExitInvalid = 2;     // parse or validation error
constexpr int kExitIo = 3;
constexpr int kExitProperty = 4;

int exit_code_for(ErrorCode code);

struct PropertyCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunResult {
  int exit_code = kExitOk;
  double spring_scale = 1.0;
  bool scale_calibrated = false;
  std::vector<PropertyCheck> checks;
  std::vector<std::pair<std::string, std::size_t>> files;  // name, bytes
  std::vector<std::string> notes;
  std::string error;
};

/// Runs one command, writing CSVs and `summary` under config.out_dir.
/// Library errors are caught and mapped to exit codes.
RunResult run(const RunConfig& config, Command command);

}  // namespace exo
