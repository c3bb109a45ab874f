#pragma once

// Run configuration: INI-style text with sections [chain] [springs] [design]
// [study] [controller] [output]. Each line holds one or more key=value
// pairs separated by whitespace; '#' and ';' start comments. Every field has
// a default and unknown sections or keys are rejected.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "exotendon/statics.hpp"

namespace exo {

enum class SpringSelection { Artificial, Cruz, Custom };

struct RunConfig {
  PhalanxChain chain;

  SpringSelection spring_set = SpringSelection::Artificial;
  TorsionSpringSet springs;          // k values used when spring_set == Custom
  std::optional<double> scale;       // nullopt: calibrate
  double calibration_target = 80.0;  // N, Baseline at full extension

  std::vector<DesignVariant> variants{DesignVariant::DesignB};
  bool variants_explicit = false;
  double x1 = 17.0;
  double x2 = 19.0;
  double h = 17.0;
  DesignPlacement placement;
  CouplingRule coupling;

  double theta_min = -90.0;
  double theta_max = 0.0;
  double theta_step = 1.0;
  std::vector<double> x1_grid{11.0, 14.0, 17.0, 20.0};
  std::vector<double> x2_grid{13.0, 16.0, 19.0, 22.0};
  double tension_max = 100.0;
  std::size_t tension_steps = 200;
  std::size_t reps = 50;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  ControllerParams controller;
  double duration = 5.0;
  std::optional<double> release_time;

  std::filesystem::path out_dir = "out";

  DesignSpec design(DesignVariant v) const;
  /// Spring set with the selected stiffness values, unscaled (scale = 1).
  TorsionSpringSet base_springs() const;
  std::vector<double> theta_grid() const;
  std::vector<double> tension_grid() const;
};

/// Throws Error{ParseError} (with line) for malformed text or unknown keys,
/// Error{ValidationError} (with field) for values breaking an invariant.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Re-checks every invariant, e.g. after command-line overrides.
void validate_run_config(const RunConfig& config);

}  // namespace exo
