#include <algorithm>
#include <cmath>

#include "exotendon/errors.hpp"
#include "exotendon/statics.hpp"

namespace exo {

void validate_controller(const ControllerParams& ctrl) {
  auto nonneg = [](double v, const char* field) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::ValidationError, field, std::string(field) + " must be >= 0");
    }
  };
  nonneg(ctrl.kp, "kp");
  nonneg(ctrl.ki, "ki");
  nonneg(ctrl.kd, "kd");
  if (!std::isfinite(ctrl.speed_limit) || ctrl.speed_limit <= 0.0) {
    throw Error(ErrorCode::ValidationError, "speed_limit", "speed_limit must be > 0");
  }
  if (!std::isfinite(ctrl.peak_force) || ctrl.peak_force <= 0.0) {
    throw Error(ErrorCode::ValidationError, "peak_force", "peak_force must be > 0");
  }
}

bool ActuationTrace::ever_stalled() const { return first_stall() != nullptr; }

const ActuationSample* ActuationTrace::first_stall() const {
  for (const auto& s : samples) {
    if (s.stalled) return &s;
  }
  return nullptr;
}

StudyTable ActuationTrace::to_table() const {
  StudyTable t({{"t_s", "s"},
                {"displacement_mm", "mm"},
                {"tension_N", "N"},
                {"command_N", "N"},
                {"theta_mcp_deg", "deg"},
                {"theta_pip_deg", "deg"},
                {"stalled", "flag"},
                {"solver_ok", "flag"}});
  t.set_meta("study", "actuation");
  t.set_meta("sample_rate_hz", format_value(kSampleRateHz));
  t.set_meta("extension_displacement_mm", format_value(extension_displacement));
  t.set_meta("target_displacement_mm", format_value(target_displacement));
  for (const auto& s : samples) {
    t.add_row({s.t, s.displacement, s.tension, s.command, s.theta_mcp, s.theta_pip, s.stalled ? 1.0 : 0.0,
               s.solver_ok ? 1.0 : 0.0});
  }
  return t;
}

namespace {

/// Quasi-static plant tabulated over tension: spool displacement and pose.
struct Plant {
  std::vector<double> tension;
  std::vector<double> displacement;
  std::vector<double> mcp;
  std::vector<double> pip;
  std::vector<bool> ok;

  static double lerp(double a, double b, double f) { return a + (b - a) * f; }

  /// Fractional index of tension t in the table.
  std::pair<std::size_t, double> locate_tension(double t) const {
    if (t <= tension.front()) return {0, 0.0};
    if (t >= tension.back()) return {tension.size() - 2, 1.0};
    const auto it = std::upper_bound(tension.begin(), tension.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - tension.begin()) - 1;
    return {i, (t - tension[i]) / (tension[i + 1] - tension[i])};
  }

  double displacement_at(double t) const {
    const auto [i, f] = locate_tension(t);
    return lerp(displacement[i], displacement[i + 1], f);
  }

  /// Smallest tension reaching displacement s, capped at `limit`.
  double tension_for(double s, double limit) const {
    for (std::size_t i = 1; i < tension.size(); ++i) {
      if (displacement[i] >= s) {
        const double span = displacement[i] - displacement[i - 1];
        const double f = span > 0.0 ? (s - displacement[i - 1]) / span : 1.0;
        return std::min(limit, lerp(tension[i - 1], tension[i], std::clamp(f, 0.0, 1.0)));
      }
    }
    return limit;
  }

  void pose_at(double t, ActuationSample& out) const {
    const auto [i, f] = locate_tension(t);
    out.theta_mcp = lerp(mcp[i], mcp[i + 1], f);
    out.theta_pip = lerp(pip[i], pip[i + 1], f);
    out.solver_ok = ok[i] && ok[i + 1];
  }
};

Plant tabulate(const GuideLayout& layout, const PhalanxChain& chain, const TorsionSpringSet& springs,
               double peak, std::size_t points, double rest_length) {
  Plant p;
  for (double t : linspace(0.0, peak, std::max<std::size_t>(points, 2))) {
    const EquilibriumResult eq = equilibrium_config(layout, chain, springs, t);
    const double len = detail::solve_path_rad(layout, chain, eq.config.radians()).length;
    p.tension.push_back(t);
    // Enforce monotonicity against tiny solver noise.
    const double s = rest_length - len;
    p.displacement.push_back(p.displacement.empty() ? s : std::max(s, p.displacement.back()));
    p.mcp.push_back(eq.config.mcp_deg);
    p.pip.push_back(eq.config.pip_deg);
    p.ok.push_back(eq.converged);
  }
  return p;
}

}  // namespace

ActuationTrace simulate_actuation(const GuideLayout& layout, const PhalanxChain& chain,
                                  const TorsionSpringSet& springs, const ControllerParams& ctrl,
                                  const ActuationOptions& options) {
  validate_controller(ctrl);
  validate_springs(springs);
  if (!std::isfinite(options.duration) || options.duration < 0.0) {
    throw Error(ErrorCode::ValidationError, "duration", "duration must be >= 0");
  }

  const double rest_deg = springs.rest_deg;
  const double rest_length =
      detail::solve_path_rad(layout, chain, JointConfig{rest_deg, rest_deg, 0.0}.radians()).length;
  const double extended_length = detail::solve_path_rad(layout, chain, JointVector::Zero()).length;
  const Plant plant = tabulate(layout, chain, springs, ctrl.peak_force, options.plant_points, rest_length);

  ActuationTrace trace;
  if (!std::isfinite(options.overtravel) || options.overtravel < 0.0) {
    throw Error(ErrorCode::ValidationError, "overtravel", "overtravel must be >= 0");
  }
  trace.extension_displacement = rest_length - extended_length;
  trace.target_displacement = trace.extension_displacement + options.overtravel;

  const double dt = 1.0 / kSampleRateHz;
  const auto steps = static_cast<long>(std::llround(options.duration * kSampleRateHz));
  const long hold_steps = std::lround(options.stall_hold * kSampleRateHz);

  double s = 0.0;
  double integral = 0.0;
  double prev_error = trace.target_displacement;
  double tension = 0.0;
  double command = 0.0;
  long near_peak = 0;
  bool stalled = false;

  for (long n = 0; n <= steps; ++n) {
    const double t = static_cast<double>(n) * dt;
    const bool released = options.release_time && t >= *options.release_time;
    if (n > 0) {
      if (released) {
        stalled = false;
        command = 0.0;
        s = std::max(0.0, s - ctrl.speed_limit * dt);
        tension = plant.tension_for(s, ctrl.peak_force);
      } else if (!stalled) {
        const double error = trace.target_displacement - s;
        const double derivative = (error - prev_error) / dt;
        prev_error = error;
        const double trial = integral + error * dt;
        const double raw = ctrl.kp * error + ctrl.ki * trial + ctrl.kd * derivative;
        command = std::clamp(raw, 0.0, ctrl.peak_force);
        // Anti-windup: freeze the integrator while the output is saturated.
        if (raw == command) integral = trial;
        const double goal = plant.displacement_at(command);
        const double max_step = ctrl.speed_limit * dt;
        s += std::clamp(goal - s, -max_step, max_step);
        tension = s >= goal - 1e-12 ? command : plant.tension_for(s, command);
      }
    }

    ActuationSample sample;
    sample.t = t;
    sample.displacement = s;
    sample.tension = tension;
    sample.command = command;
    plant.pose_at(tension, sample);

    if (!released && !stalled) {
      near_peak = tension >= (1.0 - options.stall_force_fraction) * ctrl.peak_force ? near_peak + 1 : 0;
      const bool extended = std::abs(sample.theta_mcp) <= options.stall_extension_deg &&
                            std::abs(sample.theta_pip) <= options.stall_extension_deg;
      if (extended || near_peak >= hold_steps) stalled = true;
    }
    sample.stalled = stalled;
    trace.samples.push_back(sample);
  }
  return trace;
}

ActuationTrace simulate_actuation(const DesignSpec& spec, const PhalanxChain& chain,
                                  const TorsionSpringSet& springs, const ControllerParams& ctrl,
                                  const ActuationOptions& options) {
  return simulate_actuation(instantiate_design(spec, chain), chain, springs, ctrl, options);
}

}  // namespace exo
