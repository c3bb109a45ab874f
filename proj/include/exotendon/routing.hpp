#pragma once

// Transmission designs as ordered guide layouts, and the tendon path /
// moment-arm solver over them.

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "exotendon/finger_model.hpp"
#include "exotendon/study_table.hpp"

namespace exo {

// ---- guide elements -------------------------------------------------------

/// Terminal attachment of the tendon.
struct Anchor {
  Link owner = Link::Middle;
  Vec2d point = Vec2d::Zero();  // owner frame, mm
};

/// Point guide (ring, hole, funnel mouth) the tendon passes through.
struct Via {
  Link owner = Link::Palm;
  Vec2d point = Vec2d::Zero();
};

/// Raised pathway rigid in its owner frame. The tendon runs straight from
/// `entry` to `exit`. When `spans` is set, the pathway continues over that
/// joint and bends concentrically with it at radius `height`, so its free
/// distal end lies on the next link at the same height.
struct Channel {
  Link owner = Link::Proximal;
  Vec2d entry = Vec2d::Zero();
  Vec2d exit = Vec2d::Zero();
  double height = 0.0;
  std::optional<Joint> spans;
};

/// Circular knuckle surface centred on a joint; the tendon wraps it on the
/// dorsal side only.
struct WrapDisc {
  Joint joint = Joint::Mcp;
  double radius = 0.0;
};

using GuideElement = std::variant<Anchor, Via, Channel, WrapDisc>;

enum class GuideKind { Anchor, Via, Channel, WrapDisc };
GuideKind kind_of(const GuideElement& e);

// ---- designs ---------------------------------------------------------------

enum class DesignVariant { Traditional, Baseline, DesignA, DesignB };

/// "traditional", "baseline", "A", "B".
const char* to_string(DesignVariant v);
/// Accepts the tags above case-insensitively (plus "a"/"b", "designa"...).
std::optional<DesignVariant> parse_variant(const std::string& text);

/// Placement choices the photographs leave open. Defaults reproduce the
/// 17 mm full-extension matching.
struct DesignPlacement {
  /// Height of raised pathways above the link axis (Baseline).
  double channel_height = 17.0;
  /// Fraction of each segment covered by a Baseline pathway, centred.
  double channel_span_fraction = 0.6;
  /// Funnel mouth (Design A) height above the MCP centre ...
  double funnel_height = 17.0;
  /// ... and its distal offset from the MCP centre along the palm axis.
  double funnel_offset = 5.0;
  /// Proximal-dorsal rake of the fingertip-piece lever (Design A), deg.
  double lever_rake_deg = 10.0;
  /// Clearance required between the fingertip piece end and the funnel
  /// mouth at full extension, unless telescoping is allowed.
  double funnel_clearance = 2.0;
  bool allow_telescoping = false;
  /// Proximal distance of the motor-side cable exit on the back of the hand,
  /// as a fraction of palm_len.
  double origin_fraction = 1.0;
};

struct DesignSpec {
  DesignVariant variant = DesignVariant::DesignB;
  double x1 = 17.0;  // Design A: normal distance PIP centre -> lever support, mm
  double x2 = 19.0;  // Design A: lever length support -> end, mm
  double h = 17.0;   // Design B: pathway height, mm
  DesignPlacement placement;

  static DesignSpec traditional() { return {DesignVariant::Traditional, 17.0, 19.0, 17.0, {}}; }
  static DesignSpec baseline() { return {DesignVariant::Baseline, 17.0, 19.0, 17.0, {}}; }
  static DesignSpec design_a(double x1, double x2) { return {DesignVariant::DesignA, x1, x2, 17.0, {}}; }
  static DesignSpec design_b(double h) { return {DesignVariant::DesignB, 17.0, 19.0, h, {}}; }

  std::string tag() const;
};

struct GuideLayout {
  DesignVariant design = DesignVariant::DesignB;
  std::string tag;
  std::vector<GuideElement> elements;  // motor side (palm) -> anchor

  std::size_t count(GuideKind kind) const;
};

/// Throws Error{ValidationError} for non-positive x1/x2/h and
/// Error{IncompatibleParameters} when the design cannot be built on the
/// chain (tendon below the skin, fingertip piece colliding with the funnel).
GuideLayout instantiate_design(const DesignSpec& spec, const PhalanxChain& chain);

/// Structural checks on a hand-built layout: exactly one Anchor, last.
void validate_layout(const GuideLayout& layout);

// ---- path -------------------------------------------------------------------

enum class PieceKind {
  FreeChord,    // straight, unconstrained between guides
  GuidedChord,  // straight, inside a pathway
  WrappedArc,   // in contact with a knuckle disc
  GuidedArc,    // inside a pathway bending over a joint
};

struct PathPiece {
  PieceKind kind = PieceKind::FreeChord;
  Vec2d start = Vec2d::Zero();
  Vec2d end = Vec2d::Zero();
  // Arcs only: centre, radius and clockwise sweep (rad).
  Vec2d center = Vec2d::Zero();
  double radius = 0.0;
  double sweep = 0.0;
  std::optional<Joint> joint;  // arcs: the joint they wrap
  // Body side of each end: a link index, or for disc tangent points the
  // index of the link distal to that disc's joint.
  int start_side = 0;
  int end_side = 0;

  double length() const;
  bool in_contact() const { return kind == PieceKind::WrappedArc; }
};

struct TendonPath {
  std::vector<PathPiece> pieces;
  double length = 0.0;  // mm
  /// Index into `pieces` of the piece carrying each joint's moment, or -1.
  std::array<int, 3> crossing_piece{-1, -1, -1};

  /// Polyline vertices (piece start points plus the final end point); arcs
  /// contribute their end points only.
  std::vector<Vec2d> vertices() const;
  bool wraps(Joint j) const;
  std::size_t contact_count() const;
};

/// Shortest dorsal path through the guides in order, wrapping knuckle discs
/// tangent-arc-tangent where a straight chord would cut them.
/// Throws Error{PathInfeasible} when a guide point sits inside a disc.
TendonPath solve_path(const GuideLayout& layout, const PhalanxChain& chain,
                      const JointConfig& config);

namespace detail {
TendonPath solve_path_rad(const GuideLayout& layout, const PhalanxChain& chain,
                          const JointVector& angles_rad);
double geometric_arm(const TendonPath& path, const LinkFrames& frames, Joint joint);
}  // namespace detail

/// Perpendicular distance (mm) from the joint centre to the tendon piece
/// crossing it, or the arc radius when wrapped. Positive = extension moment.
double moment_arm_geometric(const GuideLayout& layout, const PhalanxChain& chain,
                            const JointConfig& config, Joint joint);

/// Finite-difference step for moment_arm_virtual_work, rad.
constexpr double kVirtualWorkStep = 1e-4;

/// -dL/dtheta by central difference; positive = extension moment.
double moment_arm_virtual_work(const GuideLayout& layout, const PhalanxChain& chain,
                               const JointConfig& config, Joint joint);

/// Geometric moment arms at (MCP, PIP, DIP) from a single path solve.
JointVector moment_arms(const GuideLayout& layout, const PhalanxChain& chain,
                        const JointConfig& config);

/// Rows (theta_deg, r_pip_mm, r_mcp_mm) over a drive-angle grid.
StudyTable moment_arm_table(const DesignSpec& spec, const PhalanxChain& chain,
                            const std::vector<double>& theta_grid_deg,
                            const CouplingRule& coupling = {});

/// True when the tendon produces an extension moment at the DIP with the
/// DIP at 0 deg (the fingertip-anchor hyperextension risk).
bool dip_hyperextension_risk(const GuideLayout& layout, const PhalanxChain& chain);

}  // namespace exo
