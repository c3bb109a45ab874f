// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "exotendon/run.hpp"
#include "exotendon/studies.hpp"

using namespace exo;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kArmAbsTol = 1e-3;           // mm
constexpr double kArmRelTol = 1e-4;
constexpr double kCrossValidationBudget = 5.0;  // s
constexpr double kMatchTol = 1e-9;             // mm, 17 mm full-extension matching
constexpr double kConstancyBound = 0.15;
constexpr double kForceCurveBudget = 30.0;     // s
constexpr std::size_t kTensionSteps = 200;
constexpr double kTensionMax = 100.0;          // N
constexpr double kResidualRel = 1e-6;
constexpr double kScaleInvarianceTol = 1e-9;   // rad
constexpr double kEnergyRelTol = 0.01;
constexpr double kExtendedBandDeg = 0.5;
constexpr double kCalibrationTarget = 80.0;    // N
constexpr double kRoundTripDigits = 12;

const PhalanxChain kChain{};

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) { return format_value(v); }

TorsionSpringSet calibrated() {
  TorsionSpringSet s = TorsionSpringSet::artificial_finger();
  s.scale = calibrate_spring_scale(kChain, s, kCalibrationTarget);
  return s;
}

std::vector<DesignSpec> four_designs() {
  return {DesignSpec::traditional(), DesignSpec::baseline(), DesignSpec::design_a(17.0, 19.0),
          DesignSpec::design_b(17.0)};
}

std::vector<DesignSpec> fig7_designs() {
  return {DesignSpec::baseline(), DesignSpec::design_a(17.0, 19.0), DesignSpec::design_b(17.0)};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome c1_cross_validation() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::size_t bad = 0, checked = 0;
  for (const auto& d : four_designs()) {
    const GuideLayout g = instantiate_design(d, kChain);
    for (double th : default_theta_grid()) {
      const JointConfig c = apply_coupling(th, {});
      for (Joint j : {Joint::Mcp, Joint::Pip}) {
        const double r = moment_arm_geometric(g, kChain, c, j);
        const double v = moment_arm_virtual_work(g, kChain, c, j);
        const double err = std::abs(r - v);
        worst = std::max(worst, err);
        ++checked;
        if (err > std::max(kArmAbsTol, kArmRelTol * std::abs(r))) ++bad;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {bad == 0 && secs < kCrossValidationBudget,
          std::to_string(checked) + " arms, max |geometric - virtual work| = " + fmt(worst) + " mm, " +
              std::to_string(bad) + " over tolerance, " + fmt(secs) + " s (budget " + fmt(kCrossValidationBudget) + " s)"};
}

Outcome c2_pip_ordering() {
  const DesignComparison c = compare_designs(kChain, default_theta_grid());
  std::size_t a_bad = 0, b_bad = 0;
  double min_a_gap = INFINITY, min_b_gap = INFINITY;
  bool matched = false;
  double ra0 = 0, rb0 = 0, rbase0 = 0;
  for (std::size_t i = 0; i < c.pip.num_rows(); ++i) {
    const double th = c.pip.at(i, "theta_deg");
    const double base = c.pip.at(i, "r_base_mm");
    const double a = c.pip.at(i, "r_A_mm");
    const double b = c.pip.at(i, "r_B_mm");
    if (!(a > base)) ++a_bad;
    min_a_gap = std::min(min_a_gap, a - base);
    if (th == 0.0) {
      ra0 = a, rb0 = b, rbase0 = base;
      matched = std::abs(b - 17.0) <= kMatchTol && std::abs(base - 17.0) <= kMatchTol;
    } else {
      if (!(b > base)) ++b_bad;
      min_b_gap = std::min(min_b_gap, b - base);
    }
  }
  const bool a_largest = ra0 > rb0 && ra0 > rbase0;
  return {a_bad == 0 && b_bad == 0 && matched && a_largest,
          "A>base at 91/91 (min gap " + fmt(min_a_gap) + " mm, " + std::to_string(a_bad) + " violations); B>base at " +
              std::to_string(90 - b_bad) + "/90 flexed samples (min gap " + fmt(min_b_gap) +
              " mm), B = base = 17 mm at 0 deg: " + (matched ? "yes" : "no") + "; at 0 deg r_A=" + fmt(ra0) +
              " r_B=" + fmt(rb0) + " r_base=" + fmt(rbase0)};
}

Outcome c3_design_a_pip_over_mcp() {
  const DesignComparison c = compare_designs(kChain, default_theta_grid());
  std::size_t bad = 0;
  double min_gap = INFINITY;
  for (std::size_t i = 0; i < c.a_arms.num_rows(); ++i) {
    const double gap = c.a_arms.at(i, "r_A_pip_mm") - c.a_arms.at(i, "r_A_mcp_mm");
    min_gap = std::min(min_gap, gap);
    if (!(gap > 0.0)) ++bad;
  }
  return {bad == 0, "r_PIP - r_MCP >= " + fmt(min_gap) + " mm over 91 samples, " + std::to_string(bad) + " violations"};
}

Outcome c4_sensitivity() {
  const StudyTable t = sweep_design_a(default_x1_grid(), default_x2_grid(), default_theta_grid());
  auto spread = [&](const char* fixed_col, double fixed, double th) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < t.num_rows(); ++i) {
      if (t.at(i, fixed_col) != fixed || t.at(i, "theta_deg") != th) continue;
      lo = std::min(lo, t.at(i, "r_pip_mm"));
      hi = std::max(hi, t.at(i, "r_pip_mm"));
    }
    return hi - lo;
  };
  const double x1_ext = spread("x2_mm", 19.0, 0.0);
  const double x1_flex = spread("x2_mm", 19.0, -90.0);
  const double x2_flex = spread("x1_mm", 17.0, -90.0);
  const double x2_ext = spread("x1_mm", 17.0, 0.0);
  return {x1_ext > x1_flex && x2_flex > x2_ext,
          "x1 spread " + fmt(x1_ext) + " mm at 0 deg vs " + fmt(x1_flex) + " mm at -90 deg; x2 spread " + fmt(x2_flex) +
              " mm at -90 deg vs " + fmt(x2_ext) + " mm at 0 deg"};
}

Outcome c5_design_b_constancy() {
  const double h = 17.0;
  const StudyTable t = moment_arm_table(DesignSpec::design_b(h), kChain, default_theta_grid());
  double worst = 0.0;
  for (double r : t.column("r_pip_mm")) worst = std::max(worst, std::abs(r - h) / h);
  return {worst <= kConstancyBound, "max |r_PIP - h|/h = " + fmt(worst) + " (bound " + fmt(kConstancyBound) + ")"};
}

Outcome c6_force_curves() {
  const auto t0 = std::chrono::steady_clock::now();
  const TorsionSpringSet s = calibrated();
  const auto tg = linspace(0.0, kTensionMax, kTensionSteps);
  std::vector<StudyTable> c;
  for (const auto& d : fig7_designs()) c.push_back(force_angle_curve(d, kChain, s, tg));
  const double secs = seconds_since(t0);

  std::size_t bad = 0, compared = 0;
  for (int th = -89; th <= -20; ++th) {
    for (const char* col : {"theta_pip_deg", "theta_mcp_deg"}) {
      const double tb = tension_at_angle(c[0], col, th);
      for (std::size_t o = 1; o < 3; ++o) {
        const double to = tension_at_angle(c[o], col, th);
        ++compared;
        if (!(tb > to)) ++bad;
      }
    }
  }
  auto at = [&](std::size_t i, double th) { return tension_at_angle(c[i], "theta_pip_deg", th); };
  const double rel_a80 = at(0, -80) / at(1, -80) - 1.0, rel_a30 = at(0, -30) / at(1, -30) - 1.0;
  const double rel_b80 = at(0, -80) / at(2, -80) - 1.0, rel_b30 = at(0, -30) / at(2, -30) - 1.0;
  const bool gap_ok = rel_a80 > rel_a30 && rel_b80 > rel_b30;
  bool lead = true;
  for (std::size_t i = 0; i < c[1].num_rows(); ++i) {
    if (c[1].at(i, "theta_pip_deg") < c[1].at(i, "theta_mcp_deg")) lead = false;
  }
  std::size_t unconverged = 0;
  for (const auto& t : c) {
    for (double v : t.column("converged")) unconverged += v == 0.0;
  }
  std::ostringstream d;
  d << "T_base > T_A, T_B at " << (compared - bad) << "/" << compared << " (joint, angle) samples in [-89, -20] deg; "
    << "relative PIP gap vs A " << fmt(rel_a80) << " at -80 deg vs " << fmt(rel_a30) << " at -30 deg, vs B "
    << fmt(rel_b80) << " vs " << fmt(rel_b30) << " (absolute gap vs B " << fmt(at(0, -80) - at(2, -80)) << " N vs "
    << fmt(at(0, -30) - at(2, -30)) << " N); A theta_PIP >= theta_MCP: " << (lead ? "yes" : "no") << "; "
    << unconverged << " unconverged rows; " << fmt(secs) << " s for " << kTensionSteps << " steps x 3 designs";
  return {bad == 0 && gap_ok && lead && unconverged == 0 && secs < kForceCurveBudget, d.str()};
}

Outcome c7_equilibrium_suite() {
  const TorsionSpringSet s = calibrated();
  bool zero_ok = true, residual_ok = true, monotone_ok = true, scale_ok = true, energy_ok = true;
  double worst_res = 0.0, worst_scale = 0.0, worst_energy = 0.0;
  for (const auto& d : fig7_designs()) {
    const GuideLayout g = instantiate_design(d, kChain);
    const EquilibriumResult z = equilibrium_config(g, kChain, s, 0.0);
    zero_ok = zero_ok && z.converged && z.config.mcp_deg == s.rest_deg && z.config.pip_deg == s.rest_deg;

    double prev_mcp = -INFINITY, prev_pip = -INFINITY;
    for (double t : linspace(0.0, kTensionMax, 100)) {
      const EquilibriumResult r = equilibrium_config(g, kChain, s, t);
      const JointVector arms = moment_arms(g, kChain, r.config);
      const JointVector tau = spring_torques(s, r.config);
      for (Joint j : {Joint::Mcp, Joint::Pip}) {
        const double moment = t * arms[index(j)];
        const double res = tau[index(j)] - moment;
        const double rel = (r.at_stop[index(j)] ? std::max(0.0, res) : std::abs(res)) / std::max(1.0, moment);
        worst_res = std::max(worst_res, rel);
        if (!r.converged || rel > kResidualRel) residual_ok = false;
      }
      if (r.config.mcp_deg < prev_mcp || r.config.pip_deg < prev_pip) monotone_ok = false;
      prev_mcp = r.config.mcp_deg;
      prev_pip = r.config.pip_deg;
    }

    for (double t : {3.0, 20.0, 45.0, 70.0}) {
      for (double f : {0.1, 7.0}) {
        const JointVector a = equilibrium_config(g, kChain, s, t).config.radians();
        const JointVector b = equilibrium_config(g, kChain, s.scaled_by(f), f * t).config.radians();
        const double diff = (a - b).cwiseAbs().maxCoeff();
        worst_scale = std::max(worst_scale, diff);
        if (diff > kScaleInvarianceTol) scale_ok = false;
      }
    }

    // Quasi-static stroke; tension steps keep each joint move within about 1 deg.
    const JointConfig rest{s.rest_deg, s.rest_deg, 0.0};
    const double rest_len = solve_path(g, kChain, rest).length;
    double work = 0.0, prev_t = 0.0, prev_s = 0.0;
    JointConfig last = rest;
    for (double t : linspace(0.0, 90.0, 901)) {
      const EquilibriumResult r = equilibrium_config(g, kChain, s, t);
      const double sp = rest_len - solve_path(g, kChain, r.config).length;
      work += 0.5 * (t + prev_t) * (sp - prev_s);
      prev_t = t;
      prev_s = sp;
      last = r.config;
    }
    const double energy = spring_energy(s, last) - spring_energy(s, rest);
    const double rel = std::abs(work - energy) / energy;
    worst_energy = std::max(worst_energy, rel);
    if (rel > kEnergyRelTol) energy_ok = false;
  }
  std::ostringstream d;
  d << "zero-tension rest exact: " << (zero_ok ? "yes" : "no") << "; max relative residual " << fmt(worst_res)
    << "; monotone: " << (monotone_ok ? "yes" : "no") << "; scale invariance max " << fmt(worst_scale)
    << " rad; work-energy max relative error " << fmt(worst_energy);
  return {zero_ok && residual_ok && monotone_ok && scale_ok && energy_ok, d.str()};
}

Outcome c8_actuation() {
  const TorsionSpringSet s = calibrated();
  const double need = required_tension(DesignSpec::baseline(), kChain, s, 0.0).binding;
  bool ok = std::abs(need - kCalibrationTarget) <= 1e-9 * kCalibrationTarget;
  std::ostringstream d;
  d << "Baseline needs " << fmt(need) << " N at 0 deg;";
  for (const auto& design : fig7_designs()) {
    for (double peak : {100.0, 10.0}) {
      ControllerParams ctrl;
      ctrl.peak_force = peak;
      const ActuationTrace tr = simulate_actuation(design, kChain, s, ctrl);
      const ActuationSample* st = tr.first_stall();
      const ActuationSample& last = tr.samples.back();
      bool case_ok = st != nullptr && last.stalled;
      if (case_ok && peak == 100.0) {
        case_ok = std::abs(st->theta_mcp) <= kExtendedBandDeg && std::abs(st->theta_pip) <= kExtendedBandDeg &&
                  std::abs(last.theta_mcp) <= kExtendedBandDeg && std::abs(last.theta_pip) <= kExtendedBandDeg;
      } else if (case_ok) {
        case_ok = st->theta_mcp < -45.0 && st->theta_pip < -45.0 && st->tension >= 0.99 * peak;
      }
      ok = ok && case_ok;
      d << " " << design.tag() << "@" << fmt(peak) << "N ";
      if (st) {
        d << "stall t=" << fmt(st->t) << "s (" << fmt(st->theta_mcp) << "," << fmt(st->theta_pip) << ") deg";
      } else {
        d << "no stall";
      }
      d << (case_ok ? "" : " [unexpected]") << ";";
    }
  }
  return {ok, d.str()};
}

Outcome c9_determinism() {
  const fs::path root = fs::temp_directory_path() / "exotendon_acceptance";
  fs::remove_all(root);
  RunConfig cfg = parse_config("[design]\nvariant=baseline,A,B\n[study]\nnoise_sigma=1.5 reps=10 seed=20260101 tension_steps=40\n");
  std::vector<std::string> outputs;
  for (const char* sub : {"a", "b"}) {
    cfg.out_dir = root / sub;
    const RunResult r = run(cfg, Command::Experiment);
    if (r.exit_code != kExitOk) return {false, "experiment run failed: " + r.error};
    std::ifstream in(cfg.out_dir / "experiment.csv", std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    outputs.push_back(ss.str());
  }
  const bool identical = outputs[0] == outputs[1] && !outputs[0].empty();

  const StudyTable orig = compare_designs(kChain, default_theta_grid()).pip;
  export_csv(orig, root / "roundtrip.csv");
  const StudyTable back = import_csv(root / "roundtrip.csv");
  std::size_t mismatches = 0;
  bool shape = back.columns() == orig.columns() && back.metadata() == orig.metadata() && back.num_rows() == orig.num_rows();
  for (std::size_t i = 0; shape && i < orig.num_rows(); ++i) {
    for (std::size_t j = 0; j < orig.num_cols(); ++j) {
      // Equal to 12 significant digits.
      if (format_value(orig.rows()[i][j]) != format_value(back.rows()[i][j])) ++mismatches;
    }
  }
  fs::remove_all(root);
  return {identical && shape && mismatches == 0,
          std::string("repeat run byte-identical: ") + (identical ? "yes" : "no") + " (" +
              std::to_string(outputs[0].size()) + " bytes); round trip at " + fmt(kRoundTripDigits) +
              " significant digits: " + std::to_string(mismatches) + " mismatching cells"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"moment-arm cross-validation", c1_cross_validation},
      {"PIP moment-arm ordering vs Baseline", c2_pip_ordering},
      {"Design A PIP arm exceeds MCP arm", c3_design_a_pip_over_mcp},
      {"Design A x1/x2 sensitivity structure", c4_sensitivity},
      {"Design B moment-arm constancy", c5_design_b_constancy},
      {"force-angle curve ordering", c6_force_curves},
      {"equilibrium solver suite", c7_equilibrium_suite},
      {"actuation stall semantics", c8_actuation},
      {"determinism and CSV round trip", c9_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] criterion %zu: %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    failed += o.pass ? 0 : 1;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
