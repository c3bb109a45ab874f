#include <algorithm>
#include <cmath>
#include <limits>

#include "exotendon/errors.hpp"
#include "exotendon/routing.hpp"

namespace exo {

double PathPiece::length() const {
  if (kind == PieceKind::WrappedArc || kind == PieceKind::GuidedArc) return radius * sweep;
  return (end - start).norm();
}

std::vector<Vec2d> TendonPath::vertices() const {
  std::vector<Vec2d> v;
  if (pieces.empty()) return v;
  for (const auto& p : pieces) v.push_back(p.start);
  v.push_back(pieces.back().end);
  return v;
}

bool TendonPath::wraps(Joint j) const {
  return std::any_of(pieces.begin(), pieces.end(), [j](const PathPiece& p) {
    return p.kind == PieceKind::WrappedArc && p.joint == j && p.sweep > 0.0;
  });
}

std::size_t TendonPath::contact_count() const {
  return static_cast<std::size_t>(std::count_if(pieces.begin(), pieces.end(), [](const PathPiece& p) {
    return p.kind == PieceKind::WrappedArc && p.sweep > 0.0;
  }));
}

namespace {

constexpr double kSweepTol = 1e-12;
constexpr double kClearTol = 1e-9;

struct Disc {
  Joint joint;
  Vec2d center;
  double radius;
};

struct Node {
  Vec2d p;
  int side;
};

enum class Link2 { Free, Guided, Bend };

struct Connection {
  Link2 kind = Link2::Free;
  Joint joint = Joint::Mcp;  // Bend only
  Vec2d center = Vec2d::Zero();
  double radius = 0.0;
  double sweep = 0.0;
};

int disc_side(Joint j) { return index(j) + 1; }

PathPiece chord(PieceKind kind, const Vec2d& a, int sa, const Vec2d& b, int sb) {
  PathPiece p;
  p.kind = kind;
  p.start = a;
  p.end = b;
  p.start_side = sa;
  p.end_side = sb;
  return p;
}

/// Chord keeps the disc on its right (dorsal) side, or misses it entirely.
bool clears(const Vec2d& a, const Vec2d& b, const Disc& d) {
  const Vec2d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 <= 0.0) return (a - d.center).norm() >= d.radius - kClearTol;
  const double t = (d.center - a).dot(ab) / len2;
  if (t > 0.0 && t < 1.0) return right_side_offset(a, b, d.center) >= d.radius - kClearTol;
  return point_segment_distance(a, b, d.center) >= d.radius - kClearTol;
}

/// Tangent-arc chain from a to b wrapping `wrap` in order; nullopt when the
/// tangents do not exist, an arc would reverse, or a chord cuts a candidate.
std::optional<std::vector<PathPiece>> try_chain(const Node& a, const Node& b,
                                                const std::vector<Disc>& wrap,
                                                const std::vector<Disc>& candidates) {
  std::vector<PathPiece> out;
  if (wrap.empty()) {
    out.push_back(chord(PieceKind::FreeChord, a.p, a.side, b.p, b.side));
  } else {
    const std::size_t n = wrap.size();
    std::vector<Vec2d> t_in(n), t_out(n);
    const auto first = tangent_from_point(a.p, wrap[0].center, wrap[0].radius);
    const auto last = tangent_to_point(wrap[n - 1].center, wrap[n - 1].radius, b.p);
    if (!first || !last) return std::nullopt;
    t_in[0] = *first;
    t_out[n - 1] = *last;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto t = tangent_between(wrap[i].center, wrap[i].radius, wrap[i + 1].center,
                                     wrap[i + 1].radius);
      if (!t) return std::nullopt;
      t_out[i] = t->first;
      t_in[i + 1] = t->second;
    }
    Vec2d from = a.p;
    int from_side = a.side;
    for (std::size_t i = 0; i < n; ++i) {
      const int s = disc_side(wrap[i].joint);
      out.push_back(chord(PieceKind::FreeChord, from, from_side, t_in[i], s));
      PathPiece arc;
      arc.kind = PieceKind::WrappedArc;
      arc.start = t_in[i];
      arc.end = t_out[i];
      arc.center = wrap[i].center;
      arc.radius = wrap[i].radius;
      arc.sweep = clockwise_sweep(wrap[i].center, t_in[i], t_out[i]);
      arc.joint = wrap[i].joint;
      arc.start_side = s;
      arc.end_side = s;
      if (arc.sweep < -kSweepTol) return std::nullopt;
      out.push_back(arc);
      from = t_out[i];
      from_side = s;
    }
    out.push_back(chord(PieceKind::FreeChord, from, from_side, b.p, b.side));
  }
  for (const auto& piece : out) {
    if (piece.kind != PieceKind::FreeChord) continue;
    for (const auto& d : candidates) {
      if (!clears(piece.start, piece.end, d)) return std::nullopt;
    }
  }
  return out;
}

std::vector<PathPiece> taut_segment(const Node& a, const Node& b, const std::vector<Disc>& discs) {
  std::vector<Disc> candidates;
  for (const auto& d : discs) {
    const int k = index(d.joint);
    if (a.side <= k && k < b.side && d.radius > 0.0) candidates.push_back(d);
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Disc& x, const Disc& y) { return index(x.joint) < index(y.joint); });

  std::optional<std::vector<PathPiece>> best;
  double best_len = std::numeric_limits<double>::infinity();
  const unsigned subsets = 1u << candidates.size();
  for (unsigned mask = 0; mask < subsets; ++mask) {
    std::vector<Disc> wrap;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (mask & (1u << i)) wrap.push_back(candidates[i]);
    }
    auto chain = try_chain(a, b, wrap, candidates);
    if (!chain) continue;
    double len = 0.0;
    for (const auto& p : *chain) len += p.length();
    if (len < best_len - 1e-12) {
      best_len = len;
      best = std::move(chain);
    }
  }
  if (!best) {
    throw Error(ErrorCode::PathInfeasible, "layout", "no dorsal tendon path between guides");
  }
  return *best;
}

}  // namespace

namespace detail {

TendonPath solve_path_rad(const GuideLayout& layout, const PhalanxChain& chain,
                          const JointVector& angles_rad) {
  const LinkFrames frames = forward_kinematics_rad(chain, angles_rad);

  std::vector<Disc> discs;
  for (const auto& e : layout.elements) {
    if (const auto* d = std::get_if<WrapDisc>(&e)) {
      discs.push_back({d->joint, frames.joint_center(d->joint), d->radius});
    }
  }

  std::vector<Node> nodes;
  std::vector<Connection> links;  // links[i] joins nodes[i] and nodes[i + 1]
  auto push = [&](const Node& n, const Connection& c) {
    if (!nodes.empty()) links.push_back(c);
    nodes.push_back(n);
  };

  for (const auto& e : layout.elements) {
    if (const auto* a = std::get_if<Anchor>(&e)) {
      push({frames.to_world(a->owner, a->point), index(a->owner)}, {});
    } else if (const auto* v = std::get_if<Via>(&e)) {
      push({frames.to_world(v->owner, v->point), index(v->owner)}, {});
    } else if (const auto* ch = std::get_if<Channel>(&e)) {
      const int side = index(ch->owner);
      push({frames.to_world(ch->owner, ch->entry), side}, {});
      const Vec2d exit = frames.to_world(ch->owner, ch->exit);
      push({exit, side}, {Link2::Guided});
      if (ch->spans) {
        const Joint j = *ch->spans;
        const Vec2d c = frames.joint_center(j);
        const double theta = angles_rad[index(j)];
        Connection bend{Link2::Bend, j, c, (exit - c).norm(), -theta};
        push({Vec2d(c + rotated(Vec2d(exit - c), theta)), index(distal_link(j))}, bend);
      }
    }
  }

  for (const auto& n : nodes) {
    for (const auto& d : discs) {
      if ((n.p - d.center).norm() < d.radius - kClearTol) {
        throw Error(ErrorCode::PathInfeasible, "layout", "guide point inside a knuckle disc");
      }
    }
  }

  TendonPath path;
  for (std::size_t i = 0; i < links.size(); ++i) {
    const Node& a = nodes[i];
    const Node& b = nodes[i + 1];
    const Connection& c = links[i];
    switch (c.kind) {
      case Link2::Free: {
        auto seg = taut_segment(a, b, discs);
        path.pieces.insert(path.pieces.end(), seg.begin(), seg.end());
        break;
      }
      case Link2::Guided:
        path.pieces.push_back(chord(PieceKind::GuidedChord, a.p, a.side, b.p, b.side));
        break;
      case Link2::Bend: {
        PathPiece arc = chord(PieceKind::GuidedArc, a.p, a.side, b.p, b.side);
        arc.center = c.center;
        arc.radius = c.radius;
        arc.sweep = c.sweep;
        arc.joint = c.joint;
        path.pieces.push_back(arc);
        break;
      }
    }
  }

  for (const auto& p : path.pieces) path.length += p.length();
  // A wrap or pathway bend carries the joint moment; otherwise the chord
  // whose ends lie on opposite sides of the joint does.
  for (Joint j : kAllJoints) {
    const int k = index(j);
    for (std::size_t i = 0; i < path.pieces.size() && path.crossing_piece[k] < 0; ++i) {
      const PathPiece& p = path.pieces[i];
      if ((p.kind == PieceKind::WrappedArc || p.kind == PieceKind::GuidedArc) && p.joint == j) {
        path.crossing_piece[k] = static_cast<int>(i);
      }
    }
    for (std::size_t i = 0; i < path.pieces.size() && path.crossing_piece[k] < 0; ++i) {
      const PathPiece& p = path.pieces[i];
      if ((p.kind == PieceKind::FreeChord || p.kind == PieceKind::GuidedChord) && p.start_side <= k &&
          k < p.end_side) {
        path.crossing_piece[k] = static_cast<int>(i);
      }
    }
  }
  return path;
}

double geometric_arm(const TendonPath& path, const LinkFrames& frames, Joint joint) {
  const int i = path.crossing_piece[index(joint)];
  if (i < 0) return 0.0;
  const PathPiece& p = path.pieces[static_cast<std::size_t>(i)];
  if (p.kind == PieceKind::WrappedArc || p.kind == PieceKind::GuidedArc) return p.radius;
  const Vec2d d = p.end - p.start;
  if (d.norm() <= 0.0) return 0.0;
  return cross2(Vec2d(d.normalized()), Vec2d(p.end - frames.joint_center(joint)));
}

}  // namespace detail

TendonPath solve_path(const GuideLayout& layout, const PhalanxChain& chain,
                      const JointConfig& config) {
  validate_config(config);
  return detail::solve_path_rad(layout, chain, config.radians());
}

}  // namespace exo
