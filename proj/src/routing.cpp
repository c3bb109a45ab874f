#include "exotendon/routing.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "exotendon/errors.hpp"

namespace exo {

GuideKind kind_of(const GuideElement& e) {
  return static_cast<GuideKind>(e.index());
}

const char* to_string(DesignVariant v) {
  switch (v) {
    case DesignVariant::Traditional: return "traditional";
    case DesignVariant::Baseline: return "baseline";
    case DesignVariant::DesignA: return "A";
    case DesignVariant::DesignB: return "B";
  }
  return "?";
}

std::optional<DesignVariant> parse_variant(const std::string& text) {
  std::string t;
  for (char c : text) {
    if (c != '_' && c != '-' && c != ' ') t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (t == "traditional") return DesignVariant::Traditional;
  if (t == "baseline" || t == "base") return DesignVariant::Baseline;
  if (t == "a" || t == "designa") return DesignVariant::DesignA;
  if (t == "b" || t == "designb") return DesignVariant::DesignB;
  return std::nullopt;
}

std::string DesignSpec::tag() const {
  switch (variant) {
    case DesignVariant::DesignA:
      return "A(x1=" + format_value(x1) + ",x2=" + format_value(x2) + ")";
    case DesignVariant::DesignB:
      return "B(h=" + format_value(h) + ")";
    default:
      return to_string(variant);
  }
}

std::size_t GuideLayout::count(GuideKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      elements.begin(), elements.end(), [kind](const GuideElement& e) { return kind_of(e) == kind; }));
}

namespace {

void require_positive(double v, const char* field) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw Error(ErrorCode::ValidationError, field, std::string(field) + " must be > 0");
  }
}

[[noreturn]] void incompatible(const char* field, const std::string& what) {
  throw Error(ErrorCode::IncompatibleParameters, field, what);
}

void add_discs(std::vector<GuideElement>& out, const PhalanxChain& chain, Joint from, Joint to) {
  for (int j = index(from); j <= index(to); ++j) {
    if (chain.joint_radius[j] > 0.0) out.push_back(WrapDisc{static_cast<Joint>(j), chain.joint_radius[j]});
  }
}

GuideLayout traditional_layout(const PhalanxChain& c) {
  const double d = c.dorsal_offset;
  GuideLayout g;
  g.elements.push_back(Via{Link::Palm, Vec2d(-c.palm_len, d)});
  g.elements.push_back(Via{Link::Palm, Vec2d(-0.5 * c.palm_len, d)});
  add_discs(g.elements, c, Joint::Mcp, Joint::Mcp);
  g.elements.push_back(Via{Link::Proximal, Vec2d(0.5 * c.proximal_len, d)});
  add_discs(g.elements, c, Joint::Pip, Joint::Pip);
  g.elements.push_back(Via{Link::Middle, Vec2d(0.5 * c.middle_len, d)});
  add_discs(g.elements, c, Joint::Dip, Joint::Dip);
  g.elements.push_back(Anchor{Link::Distal, Vec2d(c.distal_len, d)});
  return g;
}

GuideLayout baseline_layout(const PhalanxChain& c, const DesignPlacement& pl) {
  const double h = pl.channel_height;
  require_positive(h, "channel_height");
  if (h < c.dorsal_offset) incompatible("channel_height", "raised pathway below the skin surface");
  const double f = pl.channel_span_fraction;
  if (!(f > 0.0 && f <= 1.0)) {
    throw Error(ErrorCode::ValidationError, "channel_span_fraction", "must be in (0, 1]");
  }
  const double margin = 0.5 * (1.0 - f);
  auto section = [&](Link link, double len, double start) {
    return Channel{link, Vec2d(start + margin * len, h), Vec2d(start + (1.0 - margin) * len, h), h,
                   std::nullopt};
  };
  GuideLayout g;
  g.elements.push_back(Via{Link::Palm, Vec2d(-pl.origin_fraction * c.palm_len, h)});
  g.elements.push_back(section(Link::Palm, c.palm_len, -c.palm_len));
  add_discs(g.elements, c, Joint::Mcp, Joint::Mcp);
  g.elements.push_back(section(Link::Proximal, c.proximal_len, 0.0));
  add_discs(g.elements, c, Joint::Pip, Joint::Pip);
  g.elements.push_back(section(Link::Middle, c.middle_len, 0.0));
  // Tendon terminates at the head of the middle phalanx.
  g.elements.push_back(Anchor{Link::Middle, Vec2d(c.middle_len, h)});
  return g;
}

GuideLayout design_a_layout(const DesignSpec& s, const PhalanxChain& c) {
  require_positive(s.x1, "x1");
  require_positive(s.x2, "x2");
  const DesignPlacement& pl = s.placement;
  require_positive(pl.funnel_height, "funnel_height");
  if (s.x1 < c.dorsal_offset) incompatible("x1", "fingertip-piece support below the skin surface");
  if (pl.funnel_height < c.dorsal_offset) incompatible("funnel_height", "funnel below the skin surface");

  // Fingertip piece: rigid with the middle phalanx (the DIP is held by its
  // hyperextension stop). The lever rises from a support at normal distance
  // x1 above the PIP centre and runs proximally for x2, raked dorsally; the
  // tendon is tied to its end.
  const double rake = deg_to_rad(pl.lever_rake_deg);
  const Vec2d lever_end(-s.x2 * std::cos(rake), s.x1 + s.x2 * std::sin(rake));

  const Vec2d funnel(pl.funnel_offset, pl.funnel_height);
  const double end_x_extended = c.proximal_len + lever_end.x();
  if (!pl.allow_telescoping && end_x_extended < funnel.x() + pl.funnel_clearance) {
    incompatible("x2", "fingertip piece reaches the funnel at full extension "
                       "(set allow_telescoping to insert it)");
  }

  GuideLayout g;
  g.elements.push_back(Via{Link::Palm, Vec2d(-pl.origin_fraction * c.palm_len, pl.funnel_height)});
  g.elements.push_back(Via{Link::Palm, funnel});
  add_discs(g.elements, c, Joint::Mcp, Joint::Pip);
  g.elements.push_back(Anchor{Link::Middle, lever_end});
  return g;
}

GuideLayout design_b_layout(const DesignSpec& s, const PhalanxChain& c) {
  require_positive(s.h, "h");
  if (s.h < c.dorsal_offset) incompatible("h", "pathway below the skin surface");
  if (s.h <= c.joint_radius[index(Joint::Mcp)] || s.h <= c.joint_radius[index(Joint::Pip)]) {
    incompatible("h", "pathway bend radius does not clear the knuckle");
  }
  const double margin = 0.5 * (1.0 - s.placement.channel_span_fraction);
  GuideLayout g;
  g.elements.push_back(Via{Link::Palm, Vec2d(-s.placement.origin_fraction * c.palm_len, s.h)});
  // Back of the hand over the MCP; fixed proximally, free end on the proximal phalanx.
  g.elements.push_back(Channel{Link::Palm, Vec2d(-(1.0 - margin) * c.palm_len, s.h),
                               Vec2d(0.0, s.h), s.h, Joint::Mcp});
  add_discs(g.elements, c, Joint::Mcp, Joint::Mcp);
  // Proximal phalanx over the PIP; free end on the middle phalanx.
  g.elements.push_back(Channel{Link::Proximal, Vec2d(margin * c.proximal_len, s.h),
                               Vec2d(c.proximal_len, s.h), s.h, Joint::Pip});
  add_discs(g.elements, c, Joint::Pip, Joint::Pip);
  g.elements.push_back(Anchor{Link::Middle, Vec2d(c.middle_len, s.h)});
  return g;
}

}  // namespace

GuideLayout instantiate_design(const DesignSpec& spec, const PhalanxChain& chain) {
  validate_chain(chain);
  GuideLayout g;
  switch (spec.variant) {
    case DesignVariant::Traditional: g = traditional_layout(chain); break;
    case DesignVariant::Baseline: g = baseline_layout(chain, spec.placement); break;
    case DesignVariant::DesignA: g = design_a_layout(spec, chain); break;
    case DesignVariant::DesignB: g = design_b_layout(spec, chain); break;
  }
  g.design = spec.variant;
  g.tag = spec.tag();
  validate_layout(g);
  return g;
}

void validate_layout(const GuideLayout& layout) {
  if (layout.count(GuideKind::Anchor) != 1) {
    throw Error(ErrorCode::InvalidGeometry, "layout", "layout needs exactly one anchor");
  }
  // Discs are not on the tendon line, so only require the anchor to be the
  // last guide the tendon visits.
  for (auto it = layout.elements.rbegin(); it != layout.elements.rend(); ++it) {
    const GuideKind k = kind_of(*it);
    if (k == GuideKind::WrapDisc) continue;
    if (k != GuideKind::Anchor) {
      throw Error(ErrorCode::InvalidGeometry, "layout", "anchor must terminate the layout");
    }
    break;
  }
  for (const auto& e : layout.elements) {
    if (const auto* ch = std::get_if<Channel>(&e)) {
      if (ch->height < 0.0) throw Error(ErrorCode::InvalidGeometry, "channel.height", "negative height");
      if (ch->spans && index(*ch->spans) != index(ch->owner)) {
        throw Error(ErrorCode::InvalidGeometry, "channel.spans",
                    "a joint-spanning pathway must be owned by the link proximal to that joint");
      }
    }
    if (const auto* d = std::get_if<WrapDisc>(&e)) {
      if (d->radius < 0.0) throw Error(ErrorCode::InvalidGeometry, "wrap_disc.radius", "negative radius");
    }
  }
}

double moment_arm_geometric(const GuideLayout& layout, const PhalanxChain& chain,
                            const JointConfig& config, Joint joint) {
  validate_config(config);
  const JointVector rad = config.radians();
  const TendonPath path = detail::solve_path_rad(layout, chain, rad);
  return detail::geometric_arm(path, detail::forward_kinematics_rad(chain, rad), joint);
}

JointVector moment_arms(const GuideLayout& layout, const PhalanxChain& chain,
                        const JointConfig& config) {
  validate_config(config);
  const JointVector rad = config.radians();
  const TendonPath path = detail::solve_path_rad(layout, chain, rad);
  const LinkFrames frames = detail::forward_kinematics_rad(chain, rad);
  JointVector r;
  for (Joint j : kAllJoints) r[index(j)] = detail::geometric_arm(path, frames, j);
  return r;
}

double moment_arm_virtual_work(const GuideLayout& layout, const PhalanxChain& chain,
                               const JointConfig& config, Joint joint) {
  validate_config(config);
  JointVector plus = config.radians();
  JointVector minus = plus;
  plus[index(joint)] += kVirtualWorkStep;
  minus[index(joint)] -= kVirtualWorkStep;
  const double l_plus = detail::solve_path_rad(layout, chain, plus).length;
  const double l_minus = detail::solve_path_rad(layout, chain, minus).length;
  return -(l_plus - l_minus) / (2.0 * kVirtualWorkStep);
}

StudyTable moment_arm_table(const DesignSpec& spec, const PhalanxChain& chain,
                            const std::vector<double>& theta_grid_deg, const CouplingRule& coupling) {
  const GuideLayout layout = instantiate_design(spec, chain);
  StudyTable t({{"theta_deg", "deg"}, {"r_pip_mm", "mm"}, {"r_mcp_mm", "mm"}});
  t.set_meta("study", "moment_arm");
  t.set_meta("design", spec.tag());
  t.set_meta("chain", fingerprint(chain));
  t.set_meta("coupling", coupling.dip == DipCoupling::Locked
                             ? std::string("simultaneous+locked_dip")
                             : "simultaneous+linear_dip(" + format_value(coupling.dip_ratio) + ")");
  t.set_meta("theta_grid_points", std::to_string(theta_grid_deg.size()));
  for (double theta : theta_grid_deg) {
    const JointVector r = moment_arms(layout, chain, apply_coupling(theta, coupling));
    t.add_row({theta, r[index(Joint::Pip)], r[index(Joint::Mcp)]});
  }
  return t;
}

bool dip_hyperextension_risk(const GuideLayout& layout, const PhalanxChain& chain) {
  return moment_arm_geometric(layout, chain, JointConfig{0.0, 0.0, 0.0}, Joint::Dip) > 1e-9;
}

}  // namespace exo
