#pragma once

// Planar three-link finger (MCP, PIP, DIP) with torsion-spring joint tone.
//
// World frame: MCP centre at the origin, +x along the extended finger, +y
// dorsal. Joint angles are 0 deg at full extension and negative in flexion,
// so flexion rotates links clockwise. Angles are degrees at every public
// interface and radians internally.

#include <array>
#include <string>

#include "exotendon/geometry.hpp"

namespace exo {

enum class Joint { Mcp = 0, Pip = 1, Dip = 2 };
enum class Link { Palm = 0, Proximal = 1, Middle = 2, Distal = 3 };

constexpr std::array<Joint, 3> kAllJoints = {Joint::Mcp, Joint::Pip, Joint::Dip};

const char* to_string(Joint joint);
const char* to_string(Link link);

constexpr int index(Joint j) { return static_cast<int>(j); }
constexpr int index(Link l) { return static_cast<int>(l); }
/// The link distal to a joint (MCP -> proximal phalanx, ...).
constexpr Link distal_link(Joint j) { return static_cast<Link>(index(j) + 1); }

/// Per-joint quantity ordered (MCP, PIP, DIP).
using JointVector = Eigen::Vector3d;

constexpr double kFlexedLimitDeg = -90.0;
constexpr double kExtendedLimitDeg = 0.0;

struct PhalanxChain {
  double proximal_len = 45.0;  // mm
  double middle_len = 25.0;
  double distal_len = 20.0;
  /// Height of the dorsal skin surface above the link axis.
  double dorsal_offset = 5.0;
  /// Knuckle wrap radius at (MCP, PIP, DIP).
  JointVector joint_radius = JointVector(8.0, 6.0, 5.0);
  /// Length of the dorsal mounting region on the back of the hand,
  /// measured proximally from the MCP centre.
  double palm_len = 50.0;

  double link_length(Link link) const;
  double total_length() const { return proximal_len + middle_len + distal_len; }
};

/// Returns the chain unchanged, or throws Error{InvalidGeometry} naming the
/// first violated field.
PhalanxChain validate_chain(const PhalanxChain& chain);

struct JointConfig {
  double mcp_deg = 0.0;
  double pip_deg = 0.0;
  double dip_deg = 0.0;

  double deg(Joint j) const;
  double& deg(Joint j);
  JointVector radians() const;
  static JointConfig from_radians(const JointVector& rad);
  static JointConfig uniform(double deg) { return {deg, deg, deg}; }
};

/// Throws Error{OutOfRange} when an angle leaves [-90, 0] deg. DIP
/// hyperextension is tolerated only when explicitly allowed.
void validate_config(const JointConfig& config, bool allow_dip_hyperextension = false);

struct LinkFrame {
  Vec2d origin = Vec2d::Zero();
  double angle = 0.0;  // rad, absolute orientation

  Vec2d to_world(const Vec2d& local) const { return origin + rotated(local, angle); }
};

struct LinkFrames {
  std::array<LinkFrame, 4> links;

  const LinkFrame& operator[](Link l) const { return links[index(l)]; }
  /// Joint centres coincide with the origin of the distal link.
  Vec2d joint_center(Joint j) const { return links[index(distal_link(j))].origin; }
  Vec2d to_world(Link l, const Vec2d& local) const { return (*this)[l].to_world(local); }
};

LinkFrames forward_kinematics(const PhalanxChain& chain, const JointConfig& config);

namespace detail {
/// No range check; finite-difference probes step slightly past the ROM.
LinkFrames forward_kinematics_rad(const PhalanxChain& chain, const JointVector& angles_rad);
}  // namespace detail

enum class DipCoupling { Locked, Linear };

/// PIP and MCP move together with the drive angle; the DIP is either locked
/// at 0 deg or follows the PIP by a fixed ratio.
struct CouplingRule {
  DipCoupling dip = DipCoupling::Locked;
  double dip_ratio = 0.0;

  static CouplingRule locked() { return {}; }
  static CouplingRule linear(double ratio) { return {DipCoupling::Linear, ratio}; }
};

JointConfig apply_coupling(double drive_deg, const CouplingRule& rule);

/// Torsion springs resisting extension. Stiffness in N*mm/rad, multiplied by
/// `scale`; torque vanishes at `rest_deg`.
struct TorsionSpringSet {
  double k_mcp = 54.9;
  double k_pip = 76.9;
  double k_dip = 3.5;
  double rest_deg = -90.0;
  double scale = 1.0;
  std::string tag = "artificial";

  /// Artificial-finger proportions 3.5 : 76.9 : 54.9 (DIP : PIP : MCP).
  static TorsionSpringSet artificial_finger();
  /// Stroke-survivor extension-torque proportions 0.03 : 0.66 : 0.46, used as ratios only.
  static TorsionSpringSet cruz_kamper();

  double stiffness(Joint j) const;  // scaled
  TorsionSpringSet scaled_by(double factor) const;
};

void validate_springs(const TorsionSpringSet& springs);

/// Flexion-resisting torque (N*mm) per joint: scale * k * (theta - rest).
JointVector spring_torques(const TorsionSpringSet& springs, const JointConfig& config);

/// Elastic energy (N*mm) stored in the springs.
double spring_energy(const TorsionSpringSet& springs, const JointConfig& config);

}  // namespace exo

namespace exo {

/// Stable textual key=value description of the chain ...
std::string describe(const PhalanxChain& chain);
/// ... and its FNV-1a fingerprint, recorded in study metadata.
std::string fingerprint(const PhalanxChain& chain);

}  // namespace exo
