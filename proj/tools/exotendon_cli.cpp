// exotendon: run moment-arm studies, force curves and actuation simulations
// for tendon-driven finger orthosis designs.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "exotendon/errors.hpp"
#include "exotendon/run.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<double> theta_min, theta_max, theta_step;
  std::optional<double> x1, x2, h;
  std::optional<double> tension_max;
  std::optional<std::size_t> tension_steps;
  std::optional<double> peak_force;
  std::optional<std::size_t> reps;
  std::optional<double> noise_sigma;
  std::vector<std::string> designs;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "INI-style run configuration")->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "Output directory");
  sub->add_option("--seed", o.seed, "Random seed");
  sub->add_option("--theta-min", o.theta_min, "Drive-angle grid start, deg");
  sub->add_option("--theta-max", o.theta_max, "Drive-angle grid end, deg");
  sub->add_option("--theta-step", o.theta_step, "Drive-angle grid step, deg");
  sub->add_option("--x1", o.x1, "Design A: PIP centre to tendon normal distance, mm");
  sub->add_option("--x2", o.x2, "Design A: fingertip-piece lever length, mm");
  sub->add_option("--h", o.h, "Design B: pathway height, mm");
  sub->add_option("--tension-max", o.tension_max, "Largest tension in the force grid, N");
  sub->add_option("--tension-steps", o.tension_steps, "Number of tension grid points");
  sub->add_option("--peak-force", o.peak_force, "Motor peak force, N");
  sub->add_option("--reps", o.reps, "Experiment repetitions");
  sub->add_option("--noise-sigma", o.noise_sigma, "Gaussian force noise, N");
  sub->add_option("--design", o.designs, "Design: traditional, baseline, A or B (repeatable)");
}

void apply(exo::RunConfig& c, const Overrides& o) {
  if (o.out) c.out_dir = *o.out;
  if (o.seed) c.seed = *o.seed;
  if (o.theta_min) c.theta_min = *o.theta_min;
  if (o.theta_max) c.theta_max = *o.theta_max;
  if (o.theta_step) c.theta_step = *o.theta_step;
  if (o.x1) c.x1 = *o.x1;
  if (o.x2) c.x2 = *o.x2;
  if (o.h) c.h = *o.h;
  if (o.tension_max) c.tension_max = *o.tension_max;
  if (o.tension_steps) c.tension_steps = *o.tension_steps;
  if (o.peak_force) c.controller.peak_force = *o.peak_force;
  if (o.reps) c.reps = *o.reps;
  if (o.noise_sigma) c.noise_sigma = *o.noise_sigma;
  if (!o.designs.empty()) {
    c.variants.clear();
    for (const auto& d : o.designs) {
      const auto v = exo::parse_variant(d);
      if (!v) throw exo::Error(exo::ErrorCode::ValidationError, "design", "unknown design '" + d + "'");
      c.variants.push_back(*v);
    }
    c.variants_explicit = true;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tendon-driven finger orthosis simulator"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  Overrides o;
  const std::vector<std::pair<exo::Command, std::string>> commands = {
      {exo::Command::MomentArm, "Moment arm tables (PIP and MCP) over the drive-angle grid"},
      {exo::Command::SweepA, "Design A moment-arm sweep over x1 and x2"},
      {exo::Command::Compare, "Baseline, A and B PIP moment arms, plus Design A PIP vs MCP"},
      {exo::Command::ForceCurve, "Quasi-static force vs joint angle curves"},
      {exo::Command::Experiment, "Averaged artificial-finger force curves with optional noise"},
      {exo::Command::Simulate, "PID spool actuation until stall"},
      {exo::Command::Calibrate, "Spring scale so Baseline needs the target force at full extension"},
  };
  std::vector<std::pair<CLI::App*, exo::Command>> subs;
  for (const auto& [cmd, help] : commands) {
    CLI::App* sub = app.add_subcommand(exo::to_string(cmd), help);
    add_common(sub, o);
    subs.emplace_back(sub, cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exo::kExitInvalid;
  }

  exo::Command cmd = exo::Command::Compare;
  for (const auto& [sub, c] : subs) {
    if (sub->parsed()) cmd = c;
  }

  exo::RunConfig config;
  try {
    if (!o.config.empty()) config = exo::load_config(o.config);
    apply(config, o);
  } catch (const exo::Error& e) {
    std::cerr << "error: " << e.what();
    if (e.line() > 0) std::cerr << " (line " << e.line() << ")";
    if (!e.field().empty()) std::cerr << " [" << e.field() << "]";
    std::cerr << "\n";
    return exo::exit_code_for(e.code());
  }

  const exo::RunResult r = exo::run(config, cmd);
  std::cout << "spring_scale " << exo::format_value(r.spring_scale)
            << (r.scale_calibrated ? " (calibrated)" : "") << "\n";
  for (const auto& n : r.notes) std::cout << n << "\n";
  for (const auto& c : r.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  }
  for (const auto& [name, bytes] : r.files) std::cout << "wrote " << (config.out_dir / name).string() << " (" << bytes << " bytes)\n";
  if (!r.error.empty()) std::cerr << "error: " << r.error << "\n";
  return r.exit_code;
}
