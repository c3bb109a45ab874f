#include "exotendon/errors.hpp"

namespace exo {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::IncompatibleParameters: return "IncompatibleParameters";
    case ErrorCode::PathInfeasible: return "PathInfeasible";
    case ErrorCode::ZeroMomentArm: return "ZeroMomentArm";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::PropertyViolation: return "PropertyViolation";
  }
  return "Unknown";
}

}  // namespace exo
