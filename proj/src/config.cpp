#include "exotendon/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "exotendon/errors.hpp"
#include "exotendon/studies.hpp"

namespace exo {

DesignSpec RunConfig::design(DesignVariant v) const {
  DesignSpec s{v, x1, x2, h, placement};
  return s;
}

TorsionSpringSet RunConfig::base_springs() const {
  TorsionSpringSet s;
  switch (spring_set) {
    case SpringSelection::Artificial: s = TorsionSpringSet::artificial_finger(); break;
    case SpringSelection::Cruz: s = TorsionSpringSet::cruz_kamper(); break;
    case SpringSelection::Custom:
      s = springs;
      s.tag = "custom";
      break;
  }
  s.rest_deg = springs.rest_deg;
  s.scale = 1.0;
  return s;
}

std::vector<double> RunConfig::theta_grid() const { return stepped_grid(theta_min, theta_max, theta_step); }

std::vector<double> RunConfig::tension_grid() const { return linspace(0.0, tension_max, tension_steps); }

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

struct Ctx {
  int line;
  std::string key;
};

double to_number(const std::string& v, const Ctx& ctx) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw Error(ErrorCode::ParseError, ctx.key, "'" + v + "' is not a number", ctx.line);
  }
  return out;
}

std::uint64_t to_u64(const std::string& v, const Ctx& ctx) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw Error(ErrorCode::ParseError, ctx.key, "'" + v + "' is not an unsigned integer", ctx.line);
  }
  return out;
}

bool to_bool(const std::string& v, const Ctx& ctx) {
  const std::string l = lower(v);
  if (l == "true" || l == "yes" || l == "on" || l == "1") return true;
  if (l == "false" || l == "no" || l == "off" || l == "0") return false;
  throw Error(ErrorCode::ParseError, ctx.key, "'" + v + "' is not a boolean", ctx.line);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_numbers(const std::string& v, const Ctx& ctx) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(to_number(s, ctx));
  if (out.empty()) throw Error(ErrorCode::ParseError, ctx.key, "empty list", ctx.line);
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const Ctx&)>;

Setter num(double RunConfig::*field) {
  return [field](RunConfig& c, const std::string& v, const Ctx& ctx) { c.*field = to_number(v, ctx); };
}

template <typename F>
Setter num_with(F f) {
  return [f](RunConfig& c, const std::string& v, const Ctx& ctx) { f(c, to_number(v, ctx)); };
}

const std::map<std::string, std::map<std::string, Setter>>& grammar() {
  static const std::map<std::string, std::map<std::string, Setter>> g = {
      {"chain",
       {
           {"proximal_len", num_with([](RunConfig& c, double v) { c.chain.proximal_len = v; })},
           {"middle_len", num_with([](RunConfig& c, double v) { c.chain.middle_len = v; })},
           {"distal_len", num_with([](RunConfig& c, double v) { c.chain.distal_len = v; })},
           {"dorsal_offset", num_with([](RunConfig& c, double v) { c.chain.dorsal_offset = v; })},
           {"radius_mcp", num_with([](RunConfig& c, double v) { c.chain.joint_radius[0] = v; })},
           {"radius_pip", num_with([](RunConfig& c, double v) { c.chain.joint_radius[1] = v; })},
           {"radius_dip", num_with([](RunConfig& c, double v) { c.chain.joint_radius[2] = v; })},
           {"palm_len", num_with([](RunConfig& c, double v) { c.chain.palm_len = v; })},
       }},
      {"springs",
       {
           {"set",
            [](RunConfig& c, const std::string& v, const Ctx& ctx) {
              const std::string l = lower(v);
              if (l == "artificial") c.spring_set = SpringSelection::Artificial;
              else if (l == "cruz") c.spring_set = SpringSelection::Cruz;
              else if (l == "custom") c.spring_set = SpringSelection::Custom;
              else throw Error(ErrorCode::ParseError, ctx.key, "unknown spring set '" + v + "'", ctx.line);
            }},
           {"k_mcp", num_with([](RunConfig& c, double v) { c.springs.k_mcp = v; })},
           {"k_pip", num_with([](RunConfig& c, double v) { c.springs.k_pip = v; })},
           {"k_dip", num_with([](RunConfig& c, double v) { c.springs.k_dip = v; })},
           {"rest_deg", num_with([](RunConfig& c, double v) { c.springs.rest_deg = v; })},
           {"scale",
            [](RunConfig& c, const std::string& v, const Ctx& ctx) {
              if (lower(v) == "calibrate") c.scale.reset();
              else c.scale = to_number(v, ctx);
            }},
           {"calibration_target", num(&RunConfig::calibration_target)},
       }},
      {"design",
       {
           {"variant",
            [](RunConfig& c, const std::string& v, const Ctx& ctx) {
              c.variants.clear();
              for (const auto& item : split_list(v)) {
                const auto parsed = parse_variant(item);
                if (!parsed) throw Error(ErrorCode::ParseError, ctx.key, "unknown design '" + item + "'", ctx.line);
                c.variants.push_back(*parsed);
              }
              if (c.variants.empty()) throw Error(ErrorCode::ParseError, ctx.key, "no design given", ctx.line);
              c.variants_explicit = true;
            }},
           {"x1", num(&RunConfig::x1)},
           {"x2", num(&RunConfig::x2)},
           {"h", num(&RunConfig::h)},
           {"channel_height", num_with([](RunConfig& c, double v) { c.placement.channel_height = v; })},
           {"channel_span_fraction",
            num_with([](RunConfig& c, double v) { c.placement.channel_span_fraction = v; })},
           {"funnel_height", num_with([](RunConfig& c, double v) { c.placement.funnel_height = v; })},
           {"funnel_offset", num_with([](RunConfig& c, double v) { c.placement.funnel_offset = v; })},
           {"lever_rake_deg", num_with([](RunConfig& c, double v) { c.placement.lever_rake_deg = v; })},
           {"funnel_clearance", num_with([](RunConfig& c, double v) { c.placement.funnel_clearance = v; })},
           {"origin_fraction", num_with([](RunConfig& c, double v) { c.placement.origin_fraction = v; })},
           {"allow_telescoping",
            [](RunConfig& c, const std::string& v, const Ctx& ctx) { c.placement.allow_telescoping = to_bool(v, ctx); }},
           {"dip",
            [](RunConfig& c, const std::string& v, const Ctx& ctx) {
              const std::string l = lower(v);
              if (l == "locked") c.coupling.dip = DipCoupling::Locked;
              else if (l == "linear") c.coupling.dip = DipCoupling::Linear;
              else throw Error(ErrorCode::ParseError, ctx.key, "dip must be locked or linear", ctx.line);
            }},
           {"dip_ratio", num_with([](RunConfig& c, double v) { c.coupling.dip_ratio = v; })},
       }},
      {"study",
       {
           {"theta_min", num(&RunConfig::theta_min)},
           {"theta_max", num(&RunConfig::theta_max)},
           {"theta_step", num(&RunConfig::theta_step)},
           {"x1_grid", [](RunConfig& c, const std::string& v, const Ctx& ctx) { c.x1_grid = to_numbers(v, ctx); }},
           {"x2_grid", [](RunConfig& c, const std::string& v, const Ctx& ctx) { c.x2_grid = to_numbers(v, ctx); }},
           {"tension_max", num(&RunConfig::tension_max)},
           {"tension_steps",
            [](RunConfig& c, const std::string& v, const Ctx& ctx) { c.tension_steps = to_u64(v, ctx); }},
           {"reps", [](RunConfig& c, const std::string& v, const Ctx& ctx) { c.reps = to_u64(v, ctx); }},
           {"noise_sigma", num(&RunConfig::noise_sigma)},
           {"seed", [](RunConfig& c, const std::string& v, const Ctx& ctx) { c.seed = to_u64(v, ctx); }},
       }},
      {"controller",
       {
           {"kp", num_with([](RunConfig& c, double v) { c.controller.kp = v; })},
           {"ki", num_with([](RunConfig& c, double v) { c.controller.ki = v; })},
           {"kd", num_with([](RunConfig& c, double v) { c.controller.kd = v; })},
           {"speed_limit", num_with([](RunConfig& c, double v) { c.controller.speed_limit = v; })},
           {"peak_force", num_with([](RunConfig& c, double v) { c.controller.peak_force = v; })},
           {"duration", num(&RunConfig::duration)},
           {"release_time", num_with([](RunConfig& c, double v) { c.release_time = v; })},
       }},
      {"output",
       {
           {"dir", [](RunConfig& c, const std::string& v, const Ctx&) { c.out_dir = v; }},
       }},
  };
  return g;
}

/// Splits "a=1 b = 2" into key/value pairs; whitespace around '=' is allowed.
std::vector<std::pair<std::string, std::string>> pairs_of(const std::string& line, int line_no) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t i = 0;
  const std::size_t n = line.size();
  auto skip_ws = [&] {
    while (i < n && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  };
  while (true) {
    skip_ws();
    if (i >= n) break;
    std::size_t start = i;
    while (i < n && line[i] != '=' && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::string key = line.substr(start, i - start);
    skip_ws();
    if (i >= n || line[i] != '=' || key.empty()) {
      throw Error(ErrorCode::ParseError, key, "expected key=value", line_no);
    }
    ++i;
    skip_ws();
    start = i;
    while (i < n && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::string value = line.substr(start, i - start);
    if (value.empty()) throw Error(ErrorCode::ParseError, key, "missing value", line_no);
    out.emplace_back(lower(key), value);
  }
  return out;
}

void check(bool ok, const char* field, const std::string& what) {
  if (!ok) throw Error(ErrorCode::ValidationError, field, std::string(field) + " " + what);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorCode::ParseError, "", "unterminated section header", line_no);
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (!grammar().count(section)) {
        throw Error(ErrorCode::ParseError, section, "unknown section [" + section + "]", line_no);
      }
      continue;
    }
    if (section.empty()) throw Error(ErrorCode::ParseError, "", "key outside of a section", line_no);
    const auto& keys = grammar().at(section);
    for (const auto& [key, value] : pairs_of(line, line_no)) {
      const auto it = keys.find(key);
      if (it == keys.end()) {
        throw Error(ErrorCode::ParseError, key, "unknown key '" + key + "' in [" + section + "]", line_no);
      }
      it->second(cfg, value, Ctx{line_no, key});
    }
  }
  validate_run_config(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "config", "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate_run_config(const RunConfig& c) {
  try {
    validate_chain(c.chain);
  } catch (const Error& e) {
    throw Error(ErrorCode::ValidationError, e.field(), e.what());
  }
  TorsionSpringSet s = c.base_springs();
  if (c.scale) s.scale = *c.scale;
  validate_springs(s);
  check(c.calibration_target > 0.0, "calibration_target", "must be > 0");
  check(c.x1 > 0.0, "x1", "must be > 0");
  check(c.x2 > 0.0, "x2", "must be > 0");
  check(c.h > 0.0, "h", "must be > 0");
  check(c.placement.channel_span_fraction > 0.0 && c.placement.channel_span_fraction <= 1.0,
        "channel_span_fraction", "must be in (0, 1]");
  check(c.placement.origin_fraction > 0.0, "origin_fraction", "must be > 0");
  check(c.coupling.dip == DipCoupling::Locked || std::abs(c.coupling.dip_ratio) <= 1.0, "dip_ratio",
        "must be in [-1, 1]");
  check(c.theta_min >= kFlexedLimitDeg && c.theta_max <= kExtendedLimitDeg && c.theta_min <= c.theta_max,
        "theta_min", "grid must lie within [-90, 0] with theta_min <= theta_max");
  check(c.theta_step > 0.0, "theta_step", "must be > 0");
  check(!c.x1_grid.empty(), "x1_grid", "must be non-empty");
  check(!c.x2_grid.empty(), "x2_grid", "must be non-empty");
  for (double v : c.x1_grid) check(v > 0.0, "x1_grid", "values must be > 0");
  for (double v : c.x2_grid) check(v > 0.0, "x2_grid", "values must be > 0");
  check(c.tension_max >= 0.0, "tension_max", "must be >= 0");
  check(c.tension_steps >= 2, "tension_steps", "must be >= 2");
  check(c.reps >= 1, "reps", "must be >= 1");
  check(c.noise_sigma >= 0.0, "noise_sigma", "must be >= 0");
  validate_controller(c.controller);
  check(c.duration >= 0.0, "duration", "must be >= 0");
  check(!c.release_time || *c.release_time >= 0.0, "release_time", "must be >= 0");
  check(!c.out_dir.empty(), "dir", "must be non-empty");
}

}  // namespace exo
