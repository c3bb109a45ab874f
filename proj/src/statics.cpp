#include "exotendon/statics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "exotendon/errors.hpp"

namespace exo {

namespace {

constexpr std::array<Joint, 2> kSolved{Joint::Mcp, Joint::Pip};

JointConfig with_dip(double mcp_rad, double pip_rad, const CouplingRule& dip_rule) {
  JointConfig c = JointConfig::from_radians(JointVector(mcp_rad, pip_rad, 0.0));
  if (dip_rule.dip == DipCoupling::Linear) c.dip_deg = dip_rule.dip_ratio * c.pip_deg;
  return c;
}

std::string springs_meta(const TorsionSpringSet& s) {
  return s.tag + "(k_mcp=" + format_value(s.k_mcp) + ",k_pip=" + format_value(s.k_pip) +
         ",k_dip=" + format_value(s.k_dip) + ",rest=" + format_value(s.rest_deg) + ")";
}

}  // namespace

RequiredTension required_tension(const GuideLayout& layout, const PhalanxChain& chain,
                                 const TorsionSpringSet& springs, const JointConfig& config) {
  validate_springs(springs);
  const JointVector tau = spring_torques(springs, config);
  const JointVector r = moment_arms(layout, chain, config);
  RequiredTension out;
  for (Joint j : kSolved) {
    const double rj = r[index(j)];
    if (rj <= kZeroArmEpsilon) {
      throw Error(ErrorCode::ZeroMomentArm, j == Joint::Mcp ? "mcp" : "pip",
                  "design cannot extend the joint at this pose (moment arm " + format_value(rj) + " mm)");
    }
    const double t = tau[index(j)] / rj;
    (j == Joint::Mcp ? out.mcp : out.pip) = t;
  }
  out.binding = std::max(out.pip, out.mcp);
  return out;
}

RequiredTension required_tension(const DesignSpec& spec, const PhalanxChain& chain,
                                 const TorsionSpringSet& springs, double drive_deg,
                                 const CouplingRule& coupling) {
  return required_tension(instantiate_design(spec, chain), chain, springs,
                          apply_coupling(drive_deg, coupling));
}

StudyTable tension_profile(const DesignSpec& spec, const PhalanxChain& chain,
                           const TorsionSpringSet& springs, const std::vector<double>& theta_grid_deg,
                           const CouplingRule& coupling) {
  const GuideLayout layout = instantiate_design(spec, chain);
  StudyTable t({{"theta_deg", "deg"}, {"T_pip_N", "N"}, {"T_mcp_N", "N"}, {"T_binding_N", "N"}});
  t.set_meta("study", "tension_profile");
  t.set_meta("design", spec.tag());
  t.set_meta("chain", fingerprint(chain));
  t.set_meta("springs", springs_meta(springs));
  t.set_meta("scale", format_value(springs.scale));
  for (double theta : theta_grid_deg) {
    const RequiredTension rt = required_tension(layout, chain, springs, apply_coupling(theta, coupling));
    t.add_row({theta, rt.pip, rt.mcp, rt.binding});
  }
  return t;
}

double calibrate_spring_scale(const PhalanxChain& chain, const TorsionSpringSet& springs,
                              double target_n, const DesignSpec& reference) {
  if (!(target_n > 0.0) || !std::isfinite(target_n)) {
    throw Error(ErrorCode::ValidationError, "calibration_target", "target force must be > 0");
  }
  TorsionSpringSet unit = springs;
  unit.scale = 1.0;
  const RequiredTension rt =
      required_tension(instantiate_design(reference, chain), chain, unit, JointConfig{0.0, 0.0, 0.0});
  if (!(rt.binding > 0.0)) {
    throw Error(ErrorCode::ValidationError, "springs", "springs exert no torque at full extension");
  }
  return target_n / rt.binding;
}

// ---- equilibrium --------------------------------------------------------------

namespace {

struct Problem {
  const GuideLayout& layout;
  const PhalanxChain& chain;
  const TorsionSpringSet& springs;
  double tension;
  CouplingRule dip_rule;
  double rest;
  double lo = -std::numbers::pi / 2.0;
  double hi = 0.0;

  JointVector arms(double mcp, double pip) const {
    JointVector rad = with_dip(mcp, pip, dip_rule).radians();
    rad[0] = mcp;
    rad[1] = pip;
    const TendonPath path = detail::solve_path_rad(layout, chain, rad);
    const LinkFrames frames = detail::forward_kinematics_rad(chain, rad);
    return JointVector(detail::geometric_arm(path, frames, Joint::Mcp),
                       detail::geometric_arm(path, frames, Joint::Pip), 0.0);
  }

  /// Spring-balanced angle for joint j given the current tendon moment.
  double balanced(Joint j, double moment) const {
    const double k = springs.stiffness(j);
    if (k <= 0.0) return moment > 0.0 ? hi : (moment < 0.0 ? lo : rest);
    return std::clamp(rest + moment / k, lo, hi);
  }
};

void finish(const Problem& p, double mcp, double pip, EquilibriumResult& out, const SolverOptions& opt) {
  const JointVector r = p.arms(mcp, pip);
  const std::array<double, 2> theta{mcp, pip};
  bool ok = true;
  for (std::size_t i = 0; i < 2; ++i) {
    const Joint j = kSolved[i];
    const double moment = p.tension * r[index(j)];
    const double spring = p.springs.stiffness(j) * (theta[i] - p.rest);
    double res = spring - moment;
    bool stop = false;
    if (theta[i] >= p.hi && res <= 0.0) {
      stop = true;
      res = 0.0;
    } else if (theta[i] <= p.lo && res >= 0.0) {
      stop = true;
      res = 0.0;
    }
    out.at_stop[index(j)] = stop;
    out.residual[index(j)] = res;
    if (std::abs(res) > opt.residual_rel * std::max(1.0, std::abs(moment))) ok = false;
  }
  out.config = with_dip(mcp, pip, p.dip_rule);
  out.converged = ok;
}

}  // namespace

EquilibriumResult equilibrium_config(const GuideLayout& layout, const PhalanxChain& chain,
                                     const TorsionSpringSet& springs, double tension_n,
                                     const CouplingRule& dip_rule, const SolverOptions& options) {
  validate_springs(springs);
  if (!std::isfinite(tension_n) || tension_n < 0.0) {
    throw Error(ErrorCode::ValidationError, "tension", "tension must be >= 0");
  }
  const Problem p{layout, chain, springs, tension_n, dip_rule, deg_to_rad(springs.rest_deg)};
  EquilibriumResult out;
  out.tension = tension_n;

  double mcp = p.rest;
  double pip = p.rest;
  if (tension_n == 0.0) {
    finish(p, mcp, pip, out, options);
    return out;
  }

  // Damped fixed point on theta = rest + T r(theta) / k.
  const double w = options.damping;
  for (int it = 1; it <= options.max_iterations; ++it) {
    const JointVector r = p.arms(mcp, pip);
    const double g_mcp = p.balanced(Joint::Mcp, tension_n * r[0]);
    const double g_pip = p.balanced(Joint::Pip, tension_n * r[1]);
    // Damping only approaches a stop geometrically; land on it once close.
    auto update = [&](double x, double g) {
      const double n = std::clamp((1.0 - w) * x + w * g, p.lo, p.hi);
      if ((g == p.hi || g == p.lo) && std::abs(n - g) <= options.tolerance_rad) return g;
      return n;
    };
    const double n_mcp = update(mcp, g_mcp);
    const double n_pip = update(pip, g_pip);
    const double step = std::max(std::abs(n_mcp - mcp), std::abs(n_pip - pip));
    mcp = n_mcp;
    pip = n_pip;
    out.iterations = it;
    if (step <= options.tolerance_rad) {
      finish(p, mcp, pip, out, options);
      if (out.converged) return out;
    }
    if (!std::isfinite(mcp) || !std::isfinite(pip)) break;
  }

  // Fallback: Gauss-Seidel sweeps, each joint solved by bisection with the
  // other held fixed.
  out.used_bisection = true;
  mcp = p.rest;
  pip = p.rest;
  auto solve_joint = [&](Joint j) {
    double a = p.lo;
    double b = p.hi;
    auto f = [&](double x) {
      const JointVector r = j == Joint::Mcp ? p.arms(x, pip) : p.arms(mcp, x);
      return x - p.balanced(j, tension_n * r[index(j)]);
    };
    if (f(b) <= 0.0) return b;
    if (f(a) >= 0.0) return a;
    for (int k = 0; k < 200 && b - a > 1e-14; ++k) {
      const double m = 0.5 * (a + b);
      (f(m) > 0.0 ? b : a) = m;
    }
    return 0.5 * (a + b);
  };
  for (int sweep = 0; sweep < options.max_iterations; ++sweep) {
    const double old_mcp = mcp;
    const double old_pip = pip;
    mcp = solve_joint(Joint::Mcp);
    pip = solve_joint(Joint::Pip);
    ++out.iterations;
    if (std::max(std::abs(mcp - old_mcp), std::abs(pip - old_pip)) <= options.tolerance_rad * 1e-2) break;
  }
  finish(p, mcp, pip, out, options);
  return out;
}

EquilibriumResult equilibrium_config(const DesignSpec& spec, const PhalanxChain& chain,
                                     const TorsionSpringSet& springs, double tension_n,
                                     const CouplingRule& dip_rule, const SolverOptions& options) {
  return equilibrium_config(instantiate_design(spec, chain), chain, springs, tension_n, dip_rule, options);
}

const EquilibriumResult& require_converged(const EquilibriumResult& result) {
  if (!result.converged) {
    const double worst = result.residual.cwiseAbs().maxCoeff();
    throw Error(ErrorCode::NoConvergence, "equilibrium",
                "no equilibrium at T=" + format_value(result.tension) + " N (best residual " +
                    format_value(worst) + " N*mm)");
  }
  return result;
}

std::vector<double> linspace(double lo, double hi, std::size_t steps) {
  std::vector<double> v;
  if (steps == 0) return v;
  if (steps == 1) return {lo};
  v.reserve(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    v.push_back(i + 1 == steps ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1));
  }
  return v;
}

StudyTable force_angle_curve(const DesignSpec& spec, const PhalanxChain& chain,
                             const TorsionSpringSet& springs, const std::vector<double>& tension_grid_n,
                             const CouplingRule& dip_rule) {
  if (!std::is_sorted(tension_grid_n.begin(), tension_grid_n.end())) {
    throw Error(ErrorCode::ValidationError, "tension_grid", "tension grid must be ascending");
  }
  const GuideLayout layout = instantiate_design(spec, chain);
  StudyTable t({{"tension_N", "N"}, {"theta_pip_deg", "deg"}, {"theta_mcp_deg", "deg"}, {"converged", "flag"}});
  t.set_meta("study", "force_angle");
  t.set_meta("design", spec.tag());
  t.set_meta("chain", fingerprint(chain));
  t.set_meta("springs", springs_meta(springs));
  t.set_meta("scale", format_value(springs.scale));
  for (double tension : tension_grid_n) {
    const EquilibriumResult eq = equilibrium_config(layout, chain, springs, tension, dip_rule);
    t.add_row({tension, eq.config.pip_deg, eq.config.mcp_deg, eq.converged ? 1.0 : 0.0});
  }
  return t;
}

}  // namespace exo
