#include "exotendon/run.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "exotendon/errors.hpp"
#include "exotendon/studies.hpp"

namespace exo {

const char* to_string(Command c) {
  switch (c) {
    case Command::MomentArm: return "moment-arm";
    case Command::SweepA: return "sweep-a";
    case Command::Compare: return "compare";
    case Command::ForceCurve: return "force-curve";
    case Command::Experiment: return "experiment";
    case Command::Simulate: return "simulate";
    case Command::Calibrate: return "calibrate";
  }
  return "?";
}

std::optional<Command> parse_command(const std::string& name) {
  for (Command c : {Command::MomentArm, Command::SweepA, Command::Compare, Command::ForceCurve,
                    Command::Experiment, Command::Simulate, Command::Calibrate}) {
    if (name == to_string(c)) return c;
  }
  return std::nullopt;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::ValidationError:
    case ErrorCode::IncompatibleParameters:
    case ErrorCode::InvalidGeometry:
    case ErrorCode::OutOfRange:
      return kExitInvalid;
    case ErrorCode::IoFailure: return kExitIo;
    case ErrorCode::PropertyViolation: return kExitProperty;
    default: return kExitRuntime;
  }
}

namespace {

std::string file_tag(const DesignSpec& d) {
  switch (d.variant) {
    case DesignVariant::Traditional: return "traditional";
    case DesignVariant::Baseline: return "baseline";
    case DesignVariant::DesignA: return "A";
    case DesignVariant::DesignB: return "B";
  }
  return "design";
}

class Runner {
 public:
  Runner(const RunConfig& cfg, Command cmd) : cfg_(cfg), cmd_(cmd) {}

  RunResult execute() {
    std::filesystem::create_directories(cfg_.out_dir);
    springs_ = cfg_.base_springs();
    if (cfg_.scale) {
      springs_.scale = *cfg_.scale;
    } else {
      springs_.scale = calibrate_spring_scale(cfg_.chain, springs_, cfg_.calibration_target,
                                              cfg_.design(DesignVariant::Baseline));
      result_.scale_calibrated = true;
    }
    result_.spring_scale = springs_.scale;

    switch (cmd_) {
      case Command::MomentArm: moment_arm(); break;
      case Command::SweepA: sweep_a(); break;
      case Command::Compare: compare(); break;
      case Command::ForceCurve: force_curve(false); break;
      case Command::Experiment: force_curve(true); break;
      case Command::Simulate: simulate(); break;
      case Command::Calibrate: calibrate(); break;
    }
    const bool all_pass = std::all_of(result_.checks.begin(), result_.checks.end(),
                                      [](const PropertyCheck& c) { return c.pass; });
    write_summary();
    result_.exit_code = all_pass ? kExitOk : kExitProperty;
    if (!all_pass) {
      for (const auto& c : result_.checks) {
        if (!c.pass) {
          result_.error = "PropertyViolation: " + c.name;
          break;
        }
      }
    }
    return result_;
  }

 private:
  std::vector<DesignSpec> designs(std::vector<DesignVariant> fallback) const {
    std::vector<DesignSpec> out;
    for (DesignVariant v : cfg_.variants_explicit ? cfg_.variants : fallback) out.push_back(cfg_.design(v));
    return out;
  }

  void export_table(const StudyTable& table, const std::string& name) {
    StudyTable t = table;
    t.set_meta("command", to_string(cmd_));
    t.set_meta("seed", std::to_string(cfg_.seed));
    t.set_meta("spring_scale", format_value(springs_.scale));
    const std::size_t bytes = export_csv(t, cfg_.out_dir / name);
    result_.files.emplace_back(name, bytes);
  }

  void add_check(const std::string& name, bool pass, const std::string& detail) {
    result_.checks.push_back({name, pass, detail});
  }

  void moment_arm() {
    const auto grid = cfg_.theta_grid();
    for (const DesignSpec& d : designs({cfg_.variants.front()})) {
      export_table(moment_arm_table(d, cfg_.chain, grid, cfg_.coupling), "moment_arm_" + file_tag(d) + ".csv");
      const GuideLayout layout = instantiate_design(d, cfg_.chain);
      double worst = 0.0;
      bool ok = true;
      for (double theta : grid) {
        const JointConfig c = apply_coupling(theta, cfg_.coupling);
        for (Joint j : {Joint::Mcp, Joint::Pip}) {
          const double g = moment_arm_geometric(layout, cfg_.chain, c, j);
          const double v = moment_arm_virtual_work(layout, cfg_.chain, c, j);
          const double err = std::abs(g - v);
          worst = std::max(worst, err);
          if (err > std::max(1e-3, 1e-4 * std::abs(g))) ok = false;
        }
      }
      add_check("virtual_work_agreement_" + file_tag(d), ok, "max |geometric - virtual work| = " + format_value(worst) + " mm");
      if (d.variant == DesignVariant::Traditional) {
        result_.notes.push_back("dip_hyperextension_risk_traditional=" +
                                std::string(dip_hyperextension_risk(layout, cfg_.chain) ? "true" : "false"));
      }
    }
  }

  static double spread_at(const StudyTable& t, const char* fixed_col, double fixed, double theta) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < t.num_rows(); ++i) {
      if (t.at(i, fixed_col) != fixed || t.at(i, "theta_deg") != theta || t.at(i, "incompatible") != 0.0) continue;
      lo = std::min(lo, t.at(i, "r_pip_mm"));
      hi = std::max(hi, t.at(i, "r_pip_mm"));
    }
    return hi >= lo ? hi - lo : 0.0;
  }

  static double nearest(const std::vector<double>& grid, double target) {
    return *std::min_element(grid.begin(), grid.end(), [target](double a, double b) {
      return std::abs(a - target) < std::abs(b - target);
    });
  }

  void sweep_a() {
    const auto grid = cfg_.theta_grid();
    const StudyTable t = sweep_design_a(cfg_.x1_grid, cfg_.x2_grid, grid, cfg_.chain, cfg_.placement);
    export_table(t, "sweep_a.csv");
    const double x2_fixed = nearest(cfg_.x2_grid, 19.0);
    const double x1_fixed = nearest(cfg_.x1_grid, 17.0);
    const double ext = grid.back();
    const double flex = grid.front();
    const double x1_ext = spread_at(t, "x2_mm", x2_fixed, ext);
    const double x1_flex = spread_at(t, "x2_mm", x2_fixed, flex);
    const double x2_ext = spread_at(t, "x1_mm", x1_fixed, ext);
    const double x2_flex = spread_at(t, "x1_mm", x1_fixed, flex);
    if (cfg_.x1_grid.size() > 1) {
      add_check("x1_dominates_extended", x1_ext > x1_flex,
                "x1 spread " + format_value(x1_ext) + " mm at " + format_value(ext) + " deg vs " +
                    format_value(x1_flex) + " mm at " + format_value(flex) + " deg");
    }
    if (cfg_.x2_grid.size() > 1) {
      add_check("x2_dominates_flexed", x2_flex > x2_ext,
                "x2 spread " + format_value(x2_flex) + " mm at " + format_value(flex) + " deg vs " +
                    format_value(x2_ext) + " mm at " + format_value(ext) + " deg");
    }
  }

  void compare() {
    const auto grid = cfg_.theta_grid();
    const DesignComparison cmp = compare_designs(cfg_.chain, grid, cfg_.design(DesignVariant::DesignA),
                                                 cfg_.design(DesignVariant::DesignB),
                                                 cfg_.design(DesignVariant::Baseline));
    export_table(cmp.pip, "compare.csv");
    export_table(cmp.a_arms, "compare_a_joints.csv");
    bool a_gt = true, b_gt = true, a_pip_gt_mcp = true;
    double worst_b = 0.0;
    for (std::size_t i = 0; i < cmp.pip.num_rows(); ++i) {
      const double theta = cmp.pip.at(i, "theta_deg");
      const double base = cmp.pip.at(i, "r_base_mm");
      const double ra = cmp.pip.at(i, "r_A_mm");
      const double rb = cmp.pip.at(i, "r_B_mm");
      if (!(ra > base)) a_gt = false;
      // B and Baseline are matched by construction at full extension.
      if (theta == 0.0 && cfg_.h == cfg_.placement.channel_height) {
        if (std::abs(rb - base) > 1e-9) b_gt = false;
      } else if (!(rb > base)) {
        b_gt = false;
      }
      worst_b = std::max(worst_b, std::abs(rb - cfg_.h) / cfg_.h);
      if (!(cmp.a_arms.at(i, "r_A_pip_mm") > cmp.a_arms.at(i, "r_A_mcp_mm"))) a_pip_gt_mcp = false;
    }
    add_check("A_above_baseline", a_gt, "r_A,PIP > r_base,PIP at every sample");
    add_check("B_above_baseline", b_gt, "r_B,PIP > r_base,PIP (matched at full extension)");
    add_check("A_pip_above_mcp", a_pip_gt_mcp, "Design A r_PIP > r_MCP at every sample");
    add_check("B_constancy", worst_b <= 0.15, "max |r_B - h|/h = " + format_value(worst_b));
    if (grid.back() == 0.0) {
      const std::size_t last = cmp.pip.num_rows() - 1;
      const double ra = cmp.pip.at(last, "r_A_mm");
      const double rb = cmp.pip.at(last, "r_B_mm");
      const double base = cmp.pip.at(last, "r_base_mm");
      add_check("A_largest_extended", ra > rb && ra > base,
                "at 0 deg: A " + format_value(ra) + ", B " + format_value(rb) + ", baseline " + format_value(base));
    }
  }

  void fig7_checks(const std::vector<DesignSpec>& ds, const std::vector<StudyTable>& curves) {
    std::optional<std::size_t> base;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (ds[i].variant == DesignVariant::Baseline) base = i;
    }
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (ds[i].variant == DesignVariant::DesignA) {
        bool ok = true;
        for (std::size_t r = 0; r < curves[i].num_rows(); ++r) {
          if (curves[i].at(r, "theta_pip_deg") < curves[i].at(r, "theta_mcp_deg") - 1e-9) ok = false;
        }
        add_check("A_pip_leads_mcp", ok, "theta_PIP(T) >= theta_MCP(T) along the stroke");
      }
    }
    if (!base) return;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (i == *base || ds[i].variant == DesignVariant::Traditional) continue;
      const std::string tag = file_tag(ds[i]);
      bool ordered = true;
      int compared = 0;
      for (int theta = -89; theta <= -20; ++theta) {
        for (const char* col : {"theta_pip_deg", "theta_mcp_deg"}) {
          const double tb = tension_at_angle(curves[*base], col, theta);
          const double to = tension_at_angle(curves[i], col, theta);
          if (std::isnan(tb) || std::isnan(to)) continue;
          ++compared;
          if (!(tb > to)) ordered = false;
        }
      }
      add_check("baseline_needs_more_force_than_" + tag, ordered && compared > 0,
                std::to_string(compared) + " angle samples in [-89, -20] deg");
      auto rel_gap = [&](double theta) {
        const double tb = tension_at_angle(curves[*base], "theta_pip_deg", theta);
        const double to = tension_at_angle(curves[i], "theta_pip_deg", theta);
        return tb / to - 1.0;
      };
      const double g80 = rel_gap(-80.0);
      const double g30 = rel_gap(-30.0);
      add_check("gap_larger_flexed_vs_" + tag, g80 > g30,
                "relative PIP force gap " + format_value(g80) + " at -80 deg vs " + format_value(g30) + " at -30 deg");
    }
  }

  void force_curve(bool experiment) {
    const auto ds = designs({DesignVariant::Baseline, DesignVariant::DesignA, DesignVariant::DesignB});
    const auto tgrid = cfg_.tension_grid();
    std::vector<StudyTable> curves;
    if (!experiment) {
      for (const DesignSpec& d : ds) {
        curves.push_back(force_angle_curve(d, cfg_.chain, springs_, tgrid, cfg_.coupling));
        export_table(curves.back(), "force_curve_" + file_tag(d) + ".csv");
      }
    } else {
      const StudyTable t =
          artificial_finger_experiment(ds, tgrid, cfg_.chain, springs_, {cfg_.reps, cfg_.noise_sigma, cfg_.seed});
      export_table(t, "experiment.csv");
      for (std::size_t i = 0; i < ds.size(); ++i) {
        StudyTable c({{"tension_N", "N"}, {"theta_pip_deg", "deg"}, {"theta_mcp_deg", "deg"}});
        for (std::size_t r = 0; r < t.num_rows(); ++r) {
          if (t.at(r, "design") != static_cast<double>(i)) continue;
          c.add_row({t.at(r, "force_mean_N"), t.at(r, "theta_pip_deg"), t.at(r, "theta_mcp_deg")});
        }
        curves.push_back(c);
      }
      if (cfg_.noise_sigma > 0.0 && cfg_.reps >= 2) {
        double sq = 0.0;
        for (std::size_t r = 0; r < t.num_rows(); ++r) sq += std::pow(t.at(r, "se_force_N"), 2);
        const double rms = std::sqrt(sq / static_cast<double>(t.num_rows()));
        const double bound = 1.1 * cfg_.noise_sigma / std::sqrt(static_cast<double>(cfg_.reps));
        add_check("force_standard_error", rms <= bound,
                  "rms standard error " + format_value(rms) + " N vs bound " + format_value(bound) + " N");
      }
    }
    std::size_t failed = 0;
    for (const auto& c : curves) {
      if (c.num_cols() == 4) {
        for (double v : c.column("converged")) failed += v == 0.0;
      }
    }
    add_check("equilibrium_converged", failed == 0, std::to_string(failed) + " non-converged rows");
    fig7_checks(ds, curves);
  }

  void simulate() {
    ActuationOptions opt;
    opt.duration = cfg_.duration;
    opt.release_time = cfg_.release_time;
    for (const DesignSpec& d : designs({cfg_.variants.front()})) {
      const ActuationTrace trace = simulate_actuation(d, cfg_.chain, springs_, cfg_.controller, opt);
      export_table(trace.to_table(), "simulate_" + file_tag(d) + ".csv");
      bool bounded = true, stall_ok = true;
      for (const auto& s : trace.samples) {
        if (s.tension > cfg_.controller.peak_force + 1e-9) bounded = false;
        const bool at_peak = s.tension >= 0.99 * cfg_.controller.peak_force;
        const bool extended = std::abs(s.theta_mcp) <= 0.5 && std::abs(s.theta_pip) <= 0.5;
        if (s.stalled && !(at_peak || extended)) stall_ok = false;
      }
      add_check("tension_within_peak_" + file_tag(d), bounded, "tension <= " + format_value(cfg_.controller.peak_force) + " N");
      add_check("stall_semantics_" + file_tag(d), stall_ok, "stalled only at peak force or full extension");
      const ActuationSample* st = trace.first_stall();
      std::ostringstream note;
      note << "simulate_" << file_tag(d) << ": ";
      if (st) {
        note << "stalled at t=" << format_value(st->t) << " s, tension=" << format_value(st->tension)
             << " N, theta_mcp=" << format_value(st->theta_mcp) << " deg, theta_pip=" << format_value(st->theta_pip)
             << " deg";
      } else {
        const auto& last = trace.samples.back();
        note << "no stall; final theta_mcp=" << format_value(last.theta_mcp)
             << " deg, theta_pip=" << format_value(last.theta_pip) << " deg";
      }
      result_.notes.push_back(note.str());
    }
  }

  void calibrate() {
    const auto grid = cfg_.theta_grid();
    const DesignSpec base = cfg_.design(DesignVariant::Baseline);
    export_table(tension_profile(base, cfg_.chain, springs_, grid, cfg_.coupling), "tension_profile_baseline.csv");
    const RequiredTension rt = required_tension(base, cfg_.chain, springs_, 0.0);
    result_.notes.push_back("baseline_binding_tension_at_0deg=" + format_value(rt.binding));
    if (result_.scale_calibrated) {
      add_check("calibration_target_met", std::abs(rt.binding - cfg_.calibration_target) <= 1e-9 * cfg_.calibration_target,
                "Baseline binding tension " + format_value(rt.binding) + " N");
    }
    add_check("calibration_below_peak", rt.binding < cfg_.controller.peak_force,
              "Baseline full-extension tension below motor peak");
  }

  void write_summary() {
    std::ostringstream s;
    s << "# command=" << to_string(cmd_) << "\n";
    s << "# seed=" << cfg_.seed << "\n";
    s << "# chain=" << describe(cfg_.chain) << "\n";
    s << "# springs=" << springs_.tag << "\n";
    s << "# spring_scale=" << format_value(springs_.scale) << "\n";
    s << "# spring_scale_source=" << (result_.scale_calibrated ? "calibrated" : "configured") << "\n";
    if (result_.scale_calibrated) s << "# calibration_target_N=" << format_value(cfg_.calibration_target) << "\n";
    for (const auto& n : result_.notes) s << "note " << n << "\n";
    for (const auto& c : result_.checks) {
      s << "check " << c.name << " " << (c.pass ? "pass" : "fail") << " " << c.detail << "\n";
    }
    for (const auto& [name, bytes] : result_.files) s << "file " << name << " " << bytes << "\n";
    write_file_atomic(cfg_.out_dir / "summary", s.str());
  }

  const RunConfig& cfg_;
  Command cmd_;
  TorsionSpringSet springs_;
  RunResult result_;
};

}  // namespace

RunResult run(const RunConfig& config, Command command) {
  try {
    validate_run_config(config);
    return Runner(config, command).execute();
  } catch (const Error& e) {
    RunResult r;
    r.exit_code = exit_code_for(e.code());
    r.error = e.what();
    if (!e.field().empty()) r.error += " [" + e.field() + "]";
    return r;
  } catch (const std::filesystem::filesystem_error& e) {
    RunResult r;
    r.exit_code = kExitIo;
    r.error = std::string("IoFailure: ") + e.what();
    return r;
  }
}

}  // namespace exo
