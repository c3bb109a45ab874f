#include "exotendon/studies.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "exotendon/errors.hpp"

namespace exo {

std::vector<double> stepped_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !std::isfinite(lo) || !std::isfinite(hi) || hi < lo) {
    throw Error(ErrorCode::ValidationError, "grid", "grid needs lo <= hi and step > 0");
  }
  std::vector<double> g;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) g.push_back(lo + static_cast<double>(i) * step);
  if (hi - g.back() > 1e-9 * std::max(1.0, std::abs(hi))) {
    g.push_back(hi);
  } else {
    g.back() = hi;
  }
  return g;
}

std::vector<double> default_theta_grid() { return stepped_grid(-90.0, 0.0, 1.0); }
std::vector<double> default_x1_grid() { return {11.0, 14.0, 17.0, 20.0}; }
std::vector<double> default_x2_grid() { return {13.0, 16.0, 19.0, 22.0}; }

namespace {

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_value(v[i]);
  return s;
}

}  // namespace

StudyTable sweep_design_a(const std::vector<double>& x1_grid, const std::vector<double>& x2_grid,
                          const std::vector<double>& theta_grid_deg, const PhalanxChain& chain,
                          const DesignPlacement& placement) {
  if (x1_grid.empty() || x2_grid.empty() || theta_grid_deg.empty()) {
    throw Error(ErrorCode::ValidationError, "grid", "sweep grids must be non-empty");
  }
  StudyTable t({{"x1_mm", "mm"}, {"x2_mm", "mm"}, {"theta_deg", "deg"}, {"r_pip_mm", "mm"}, {"incompatible", "flag"}});
  t.set_meta("study", "sweep_design_a");
  t.set_meta("chain", fingerprint(chain));
  t.set_meta("x1_grid", join(x1_grid));
  t.set_meta("x2_grid", join(x2_grid));
  t.set_meta("theta_grid_points", std::to_string(theta_grid_deg.size()));
  for (double x1 : x1_grid) {
    for (double x2 : x2_grid) {
      DesignSpec spec = DesignSpec::design_a(x1, x2);
      spec.placement = placement;
      std::optional<GuideLayout> layout;
      try {
        layout = instantiate_design(spec, chain);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::IncompatibleParameters) throw;
      }
      for (double theta : theta_grid_deg) {
        if (!layout) {
          t.add_row({x1, x2, theta, std::numeric_limits<double>::quiet_NaN(), 1.0});
          continue;
        }
        const double r = moment_arm_geometric(*layout, chain, apply_coupling(theta, {}), Joint::Pip);
        t.add_row({x1, x2, theta, r, 0.0});
      }
    }
  }
  return t;
}

DesignComparison compare_designs(const PhalanxChain& chain, const std::vector<double>& theta_grid_deg,
                                 const DesignSpec& a, const DesignSpec& b, const DesignSpec& base) {
  const GuideLayout la = instantiate_design(a, chain);
  const GuideLayout lb = instantiate_design(b, chain);
  const GuideLayout lbase = instantiate_design(base, chain);
  DesignComparison out{
      StudyTable({{"theta_deg", "deg"}, {"r_base_mm", "mm"}, {"r_A_mm", "mm"}, {"r_B_mm", "mm"}}),
      StudyTable({{"theta_deg", "deg"}, {"r_A_pip_mm", "mm"}, {"r_A_mcp_mm", "mm"}})};
  for (StudyTable* t : {&out.pip, &out.a_arms}) {
    t->set_meta("study", t == &out.pip ? "compare_pip" : "compare_a_joints");
    t->set_meta("chain", fingerprint(chain));
    t->set_meta("designs", base.tag() + " " + a.tag() + " " + b.tag());
    t->set_meta("theta_grid_points", std::to_string(theta_grid_deg.size()));
  }
  for (double theta : theta_grid_deg) {
    const JointConfig c = apply_coupling(theta, {});
    const JointVector ra = moment_arms(la, chain, c);
    out.pip.add_row({theta, moment_arm_geometric(lbase, chain, c, Joint::Pip), ra[index(Joint::Pip)],
                     moment_arm_geometric(lb, chain, c, Joint::Pip)});
    out.a_arms.add_row({theta, ra[index(Joint::Pip)], ra[index(Joint::Mcp)]});
  }
  return out;
}

StudyTable artificial_finger_experiment(const std::vector<DesignSpec>& designs,
                                        const std::vector<double>& tension_grid_n,
                                        const PhalanxChain& chain, const TorsionSpringSet& springs,
                                        const ExperimentOptions& options) {
  if (options.reps < 1) throw Error(ErrorCode::ValidationError, "reps", "reps must be >= 1");
  if (!std::isfinite(options.noise_sigma) || options.noise_sigma < 0.0) {
    throw Error(ErrorCode::ValidationError, "noise_sigma", "noise_sigma must be >= 0");
  }
  StudyTable t({{"design", "index"},
                {"tension_N", "N"},
                {"force_mean_N", "N"},
                {"theta_pip_deg", "deg"},
                {"theta_mcp_deg", "deg"},
                {"se_force_N", "N"},
                {"se_pip_deg", "deg"},
                {"se_mcp_deg", "deg"},
                {"converged", "flag"}});
  std::string tags;
  for (std::size_t i = 0; i < designs.size(); ++i) tags += (i ? " " : "") + designs[i].tag();
  t.set_meta("study", "artificial_finger_experiment");
  t.set_meta("designs", tags);
  t.set_meta("chain", fingerprint(chain));
  t.set_meta("springs", springs.tag);
  t.set_meta("scale", format_value(springs.scale));
  t.set_meta("reps", std::to_string(options.reps));
  t.set_meta("noise_sigma", format_value(options.noise_sigma));
  t.set_meta("seed", std::to_string(options.seed));

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double n = static_cast<double>(options.reps);

  for (std::size_t d = 0; d < designs.size(); ++d) {
    const GuideLayout layout = instantiate_design(designs[d], chain);
    for (double tension : tension_grid_n) {
      if (options.noise_sigma == 0.0) {
        // Every repetition is identical; the mean is the single run.
        const EquilibriumResult eq = equilibrium_config(layout, chain, springs, tension);
        t.add_row({static_cast<double>(d), tension, tension, eq.config.pip_deg, eq.config.mcp_deg, 0.0, 0.0,
                   0.0, eq.converged ? 1.0 : 0.0});
        continue;
      }
      double sum_f = 0.0, sum_pip = 0.0, sum_mcp = 0.0, sq_f = 0.0, sq_pip = 0.0, sq_mcp = 0.0;
      bool ok = true;
      for (std::size_t r = 0; r < options.reps; ++r) {
        const double applied = std::max(0.0, tension + options.noise_sigma * noise(rng));
        const EquilibriumResult eq = equilibrium_config(layout, chain, springs, applied);
        ok = ok && eq.converged;
        sum_f += applied;
        sq_f += applied * applied;
        sum_pip += eq.config.pip_deg;
        sum_mcp += eq.config.mcp_deg;
        sq_pip += eq.config.pip_deg * eq.config.pip_deg;
        sq_mcp += eq.config.mcp_deg * eq.config.mcp_deg;
      }
      const double m_f = sum_f / n;
      const double m_pip = sum_pip / n;
      const double m_mcp = sum_mcp / n;
      auto se = [n](double sq, double m) {
        if (n < 2.0) return 0.0;
        const double var = std::max(0.0, (sq - n * m * m) / (n - 1.0));
        return std::sqrt(var / n);
      };
      t.add_row({static_cast<double>(d), tension, m_f, m_pip, m_mcp, se(sq_f, m_f), se(sq_pip, m_pip),
                 se(sq_mcp, m_mcp), ok ? 1.0 : 0.0});
    }
  }
  return t;
}

double tension_at_angle(const StudyTable& curve, const std::string& angle_column, double angle_deg) {
  const std::vector<double> tension = curve.column("tension_N");
  const std::vector<double> angle = curve.column(angle_column);
  for (std::size_t i = 0; i < angle.size(); ++i) {
    if (angle[i] >= angle_deg) {
      if (i == 0) return tension[0];
      const double span = angle[i] - angle[i - 1];
      const double f = span > 0.0 ? (angle_deg - angle[i - 1]) / span : 1.0;
      return tension[i - 1] + f * (tension[i] - tension[i - 1]);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace exo
