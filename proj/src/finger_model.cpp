#include "exotendon/finger_model.hpp"

#include <cmath>
#include <string>

#include "exotendon/errors.hpp"

namespace exo {

const char* to_string(Joint joint) {
  switch (joint) {
    case Joint::Mcp: return "MCP";
    case Joint::Pip: return "PIP";
    case Joint::Dip: return "DIP";
  }
  return "?";
}

const char* to_string(Link link) {
  switch (link) {
    case Link::Palm: return "palm";
    case Link::Proximal: return "proximal";
    case Link::Middle: return "middle";
    case Link::Distal: return "distal";
  }
  return "?";
}

double PhalanxChain::link_length(Link link) const {
  switch (link) {
    case Link::Palm: return palm_len;
    case Link::Proximal: return proximal_len;
    case Link::Middle: return middle_len;
    case Link::Distal: return distal_len;
  }
  return 0.0;
}

namespace {

void require_geometry(bool ok, const char* field, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidGeometry, field, std::string(field) + " " + what);
}

}  // namespace

PhalanxChain validate_chain(const PhalanxChain& chain) {
  require_geometry(std::isfinite(chain.proximal_len) && chain.proximal_len > 0.0,
                   "proximal_len", "must be > 0");
  require_geometry(std::isfinite(chain.middle_len) && chain.middle_len > 0.0, "middle_len",
                   "must be > 0");
  require_geometry(std::isfinite(chain.distal_len) && chain.distal_len > 0.0, "distal_len",
                   "must be > 0");
  require_geometry(std::isfinite(chain.palm_len) && chain.palm_len > 0.0, "palm_len",
                   "must be > 0");
  require_geometry(std::isfinite(chain.dorsal_offset) && chain.dorsal_offset >= 0.0,
                   "dorsal_offset", "must be >= 0");

  // Each knuckle radius must fit inside both links that meet at the joint.
  static constexpr const char* kRadiusField[] = {"joint_radius.mcp", "joint_radius.pip",
                                                 "joint_radius.dip"};
  for (Joint j : kAllJoints) {
    const double r = chain.joint_radius[index(j)];
    const double proximal = chain.link_length(static_cast<Link>(index(j)));
    const double distal = chain.link_length(distal_link(j));
    require_geometry(std::isfinite(r) && r >= 0.0, kRadiusField[index(j)], "must be >= 0");
    require_geometry(r < proximal && r < distal, kRadiusField[index(j)],
                     "must be smaller than the adjacent phalanx lengths");
  }
  return chain;
}

double JointConfig::deg(Joint j) const {
  switch (j) {
    case Joint::Mcp: return mcp_deg;
    case Joint::Pip: return pip_deg;
    case Joint::Dip: return dip_deg;
  }
  return 0.0;
}

double& JointConfig::deg(Joint j) {
  switch (j) {
    case Joint::Mcp: return mcp_deg;
    case Joint::Pip: return pip_deg;
    case Joint::Dip: break;
  }
  return dip_deg;
}

JointVector JointConfig::radians() const {
  return JointVector(deg_to_rad(mcp_deg), deg_to_rad(pip_deg), deg_to_rad(dip_deg));
}

JointConfig JointConfig::from_radians(const JointVector& rad) {
  return {rad_to_deg(rad[0]), rad_to_deg(rad[1]), rad_to_deg(rad[2])};
}

void validate_config(const JointConfig& config, bool allow_dip_hyperextension) {
  for (Joint j : kAllJoints) {
    const double a = config.deg(j);
    const double upper =
        (j == Joint::Dip && allow_dip_hyperextension) ? 90.0 : kExtendedLimitDeg;
    if (!std::isfinite(a) || a < kFlexedLimitDeg || a > upper) {
      throw Error(ErrorCode::OutOfRange, to_string(j),
                  std::string(to_string(j)) + " angle " + std::to_string(a) +
                      " deg outside [-90, 0]");
    }
  }
}

namespace detail {

LinkFrames forward_kinematics_rad(const PhalanxChain& chain, const JointVector& angles_rad) {
  LinkFrames frames;
  frames.links[index(Link::Palm)] = {Vec2d::Zero(), 0.0};
  double heading = 0.0;
  Vec2d origin = Vec2d::Zero();
  for (Joint j : kAllJoints) {
    const Link link = distal_link(j);
    heading += angles_rad[index(j)];
    frames.links[index(link)] = {origin, heading};
    origin += rotated(Vec2d(chain.link_length(link), 0.0), heading);
  }
  return frames;
}

}  // namespace detail

LinkFrames forward_kinematics(const PhalanxChain& chain, const JointConfig& config) {
  validate_config(config, /*allow_dip_hyperextension=*/true);
  return detail::forward_kinematics_rad(chain, config.radians());
}

JointConfig apply_coupling(double drive_deg, const CouplingRule& rule) {
  if (!std::isfinite(drive_deg) || drive_deg < kFlexedLimitDeg || drive_deg > kExtendedLimitDeg) {
    throw Error(ErrorCode::OutOfRange, "drive_angle",
                "drive angle " + std::to_string(drive_deg) + " deg outside [-90, 0]");
  }
  JointConfig c{drive_deg, drive_deg, 0.0};
  if (rule.dip == DipCoupling::Linear) c.dip_deg = rule.dip_ratio * drive_deg;
  return c;
}

TorsionSpringSet TorsionSpringSet::artificial_finger() { return {}; }

TorsionSpringSet TorsionSpringSet::cruz_kamper() {
  return {0.46, 0.66, 0.03, -90.0, 1.0, "cruz"};
}

double TorsionSpringSet::stiffness(Joint j) const {
  switch (j) {
    case Joint::Mcp: return scale * k_mcp;
    case Joint::Pip: return scale * k_pip;
    case Joint::Dip: return scale * k_dip;
  }
  return 0.0;
}

TorsionSpringSet TorsionSpringSet::scaled_by(double factor) const {
  TorsionSpringSet s = *this;
  s.scale *= factor;
  return s;
}

void validate_springs(const TorsionSpringSet& springs) {
  auto check = [](double v, const char* field) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::ValidationError, field, std::string(field) + " must be >= 0");
    }
  };
  check(springs.k_mcp, "k_mcp");
  check(springs.k_pip, "k_pip");
  check(springs.k_dip, "k_dip");
  check(springs.scale, "scale");
  if (!std::isfinite(springs.rest_deg) || springs.rest_deg < kFlexedLimitDeg ||
      springs.rest_deg > kExtendedLimitDeg) {
    throw Error(ErrorCode::ValidationError, "rest_angle", "rest angle outside [-90, 0]");
  }
}

JointVector spring_torques(const TorsionSpringSet& springs, const JointConfig& config) {
  validate_config(config);
  const double rest = deg_to_rad(springs.rest_deg);
  const JointVector rad = config.radians();
  JointVector tau;
  for (Joint j : kAllJoints) tau[index(j)] = springs.stiffness(j) * (rad[index(j)] - rest);
  return tau;
}

double spring_energy(const TorsionSpringSet& springs, const JointConfig& config) {
  const double rest = deg_to_rad(springs.rest_deg);
  const JointVector rad = config.radians();
  double e = 0.0;
  for (Joint j : kAllJoints) {
    const double d = rad[index(j)] - rest;
    e += 0.5 * springs.stiffness(j) * d * d;
  }
  return e;
}

}  // namespace exo

#include "exotendon/study_table.hpp"

namespace exo {

std::string describe(const PhalanxChain& chain) {
  std::string s;
  s += "proximal_len=" + format_value(chain.proximal_len);
  s += ";middle_len=" + format_value(chain.middle_len);
  s += ";distal_len=" + format_value(chain.distal_len);
  s += ";dorsal_offset=" + format_value(chain.dorsal_offset);
  s += ";radius_mcp=" + format_value(chain.joint_radius[0]);
  s += ";radius_pip=" + format_value(chain.joint_radius[1]);
  s += ";radius_dip=" + format_value(chain.joint_radius[2]);
  s += ";palm_len=" + format_value(chain.palm_len);
  return s;
}

std::string fingerprint(const PhalanxChain& chain) { return fnv1a_hex(describe(chain)); }

}  // namespace exo
