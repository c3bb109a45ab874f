#pragma once

// Quasi-static force analysis of a design against the spasticity springs:
// tension needed to hold a pose, pose reached at a given tension, and a
// spool-level actuation run with a PID position controller.

#include <array>
#include <optional>
#include <vector>

#include "exotendon/routing.hpp"

namespace exo {

/// Moment arms at or below this value (mm) cannot extend a joint.
constexpr double kZeroArmEpsilon = 1e-9;

struct RequiredTension {
  double pip = 0.0;      // N
  double mcp = 0.0;      // N
  double binding = 0.0;  // max(pip, mcp)
};

/// T_j = tau_j / r_j at the configuration. Throws Error{ZeroMomentArm}.
RequiredTension required_tension(const GuideLayout& layout, const PhalanxChain& chain,
                                 const TorsionSpringSet& springs, const JointConfig& config);
RequiredTension required_tension(const DesignSpec& spec, const PhalanxChain& chain,
                                 const TorsionSpringSet& springs, double drive_deg,
                                 const CouplingRule& coupling = {});

/// Rows (theta_deg, T_pip_N, T_mcp_N, T_binding_N) along the coupled drive angle.
StudyTable tension_profile(const DesignSpec& spec, const PhalanxChain& chain,
                           const TorsionSpringSet& springs, const std::vector<double>& theta_grid_deg,
                           const CouplingRule& coupling = {});

/// Spring scale at which `reference` needs exactly `target_n` to hold full
/// extension (binding joint).
double calibrate_spring_scale(const PhalanxChain& chain, const TorsionSpringSet& springs,
                              double target_n = 80.0,
                              const DesignSpec& reference = DesignSpec::baseline());

struct SolverOptions {
  double damping = 0.5;
  double tolerance_rad = 1e-8;
  int max_iterations = 10000;
  /// Converged results satisfy |k dtheta - T r| <= residual_rel * max(1, T r).
  double residual_rel = 1e-6;
};

struct EquilibriumResult {
  double tension = 0.0;
  JointConfig config;
  /// k_j (theta_j - rest) - T r_j in N*mm; zero at a joint held by its stop.
  JointVector residual = JointVector::Zero();
  std::array<bool, 3> at_stop{false, false, false};
  int iterations = 0;
  bool converged = false;
  bool used_bisection = false;
};

/// Solves MCP and PIP independently (no drive coupling); the DIP follows
/// `dip_rule` from the PIP angle. Returns converged=false with the best
/// iterate instead of throwing; see require_converged.
EquilibriumResult equilibrium_config(const GuideLayout& layout, const PhalanxChain& chain,
                                     const TorsionSpringSet& springs, double tension_n,
                                     const CouplingRule& dip_rule = {}, const SolverOptions& options = {});
EquilibriumResult equilibrium_config(const DesignSpec& spec, const PhalanxChain& chain,
                                     const TorsionSpringSet& springs, double tension_n,
                                     const CouplingRule& dip_rule = {}, const SolverOptions& options = {});

/// Throws Error{NoConvergence} carrying the best residual.
const EquilibriumResult& require_converged(const EquilibriumResult& result);

/// Rows (tension_N, theta_pip_deg, theta_mcp_deg, converged). Non-converged
/// rows are kept with converged = 0.
StudyTable force_angle_curve(const DesignSpec& spec, const PhalanxChain& chain,
                             const TorsionSpringSet& springs, const std::vector<double>& tension_grid_n,
                             const CouplingRule& dip_rule = {});

/// Evenly spaced grid of `steps` points on [lo, hi].
std::vector<double> linspace(double lo, double hi, std::size_t steps);

// ---- actuation --------------------------------------------------------------

struct ControllerParams {
  double kp = 5.0;   // N per mm of spool error
  double ki = 0.5;   // N per mm*s
  double kd = 0.05;  // N*s per mm
  double speed_limit = 40.0;  // mm/s
  double peak_force = 100.0;  // N
};

void validate_controller(const ControllerParams& ctrl);

constexpr double kSampleRateHz = 100.0;

struct ActuationSample {
  double t = 0.0;             // s
  double displacement = 0.0;  // mm of tendon pulled in
  double tension = 0.0;       // N
  double command = 0.0;       // N, controller output
  double theta_mcp = 0.0;     // deg
  double theta_pip = 0.0;     // deg
  bool stalled = false;
  bool solver_ok = true;
};

struct ActuationTrace {
  std::vector<ActuationSample> samples;
  double extension_displacement = 0.0;  // mm of spool travel for full extension
  double target_displacement = 0.0;     // mm, controller setpoint (with overtravel)

  bool ever_stalled() const;
  /// First stalled sample, if any.
  const ActuationSample* first_stall() const;
  StudyTable to_table() const;
};

struct ActuationOptions {
  double duration = 5.0;               // s
  /// Spool setpoint beyond the full-extension displacement, so the position
  /// loop keeps pulling into the extension stop until the motor stalls.
  double overtravel = 20.0;  // mm
  std::optional<double> release_time;  // s; button released, motor unwinds
  /// Stall: tension within this fraction of peak for `stall_hold` seconds ...
  double stall_force_fraction = 0.01;
  double stall_hold = 0.2;
  /// ... or both joints within this many degrees of full extension.
  double stall_extension_deg = 0.5;
  /// Tension resolution of the quasi-static plant table.
  std::size_t plant_points = 401;
};

ActuationTrace simulate_actuation(const GuideLayout& layout, const PhalanxChain& chain,
                                  const TorsionSpringSet& springs, const ControllerParams& ctrl,
                                  const ActuationOptions& options = {});
ActuationTrace simulate_actuation(const DesignSpec& spec, const PhalanxChain& chain,
                                  const TorsionSpringSet& springs, const ControllerParams& ctrl,
                                  const ActuationOptions& options = {});

}  // namespace exo
