#pragma once

#include <stdexcept>
#include <string>

namespace exo {

enum class ErrorCode {
  InvalidGeometry,
  OutOfRange,
  IncompatibleParameters,
  PathInfeasible,
  ZeroMomentArm,
  NoConvergence,
  IoFailure,
  ParseError,
  ValidationError,
  PropertyViolation,
};

const char* to_string(ErrorCode code);

/// Single exception type for the library; `code()` says what went wrong and
/// `field()` names the offending parameter when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string field, const std::string& message, int line = 0)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        field_(std::move(field)),
        line_(line) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }
  /// 1-based line number for ParseError, 0 otherwise.
  int line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::string field_;
  int line_;
};

}  // namespace exo
