#pragma once

#include <algorithm>
#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>

namespace exo {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
using Vec2d = Vec2<double>;

template <typename Scalar>
constexpr Scalar deg_to_rad(Scalar deg) {
  return deg * std::numbers::pi_v<Scalar> / Scalar(180);
}

template <typename Scalar>
constexpr Scalar rad_to_deg(Scalar rad) {
  return rad * Scalar(180) / std::numbers::pi_v<Scalar>;
}

/// z-component of the planar cross product.
template <typename Scalar>
Scalar cross2(const Vec2<Scalar>& a, const Vec2<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Counter-clockwise perpendicular.
template <typename Scalar>
Vec2<Scalar> left_normal(const Vec2<Scalar>& u) {
  return Vec2<Scalar>(-u.y(), u.x());
}

template <typename Scalar>
Vec2<Scalar> rotated(const Vec2<Scalar>& v, Scalar angle) {
  return Eigen::Rotation2D<Scalar>(angle) * v;
}

/// Wraps an angle to (-pi, pi].
template <typename Scalar>
Scalar wrap_angle(Scalar a) {
  constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  a = std::fmod(a + std::numbers::pi_v<Scalar>, two_pi);
  if (a <= Scalar(0)) a += two_pi;
  return a - std::numbers::pi_v<Scalar>;
}

template <typename Scalar>
Scalar point_segment_distance(const Vec2<Scalar>& p, const Vec2<Scalar>& q,
                              const Vec2<Scalar>& c) {
  const Vec2<Scalar> d = q - p;
  const Scalar len2 = d.squaredNorm();
  if (len2 <= Scalar(0)) return (c - p).norm();
  const Scalar t = std::clamp((c - p).dot(d) / len2, Scalar(0), Scalar(1));
  return (p + t * d - c).norm();
}

/// Signed distance from `c` to the infinite line through p->q; positive when
/// `c` lies to the right of the direction of travel.
template <typename Scalar>
Scalar right_side_offset(const Vec2<Scalar>& p, const Vec2<Scalar>& q,
                         const Vec2<Scalar>& c) {
  const Vec2<Scalar> u = (q - p).normalized();
  return -cross2(u, Vec2<Scalar>(c - p));
}

// Tangent constructions for a string that keeps each circle on its right
// (clockwise travel around the circle). All return std::nullopt when the
// tangent does not exist.

/// Tangent point on circle (c, r) for a line arriving from external point p.
template <typename Scalar>
std::optional<Vec2<Scalar>> tangent_from_point(const Vec2<Scalar>& p,
                                               const Vec2<Scalar>& c, Scalar r) {
  const Vec2<Scalar> v = c - p;
  const Scalar dist = v.norm();
  if (dist < r || dist <= Scalar(0)) return std::nullopt;
  const Vec2<Scalar> u = rotated<Scalar>(v / dist, std::asin(r / dist));
  return Vec2<Scalar>(c + r * left_normal(u));
}

/// Tangent point on circle (c, r) for a line leaving towards external point q.
template <typename Scalar>
std::optional<Vec2<Scalar>> tangent_to_point(const Vec2<Scalar>& c, Scalar r,
                                             const Vec2<Scalar>& q) {
  const Vec2<Scalar> w = q - c;
  const Scalar dist = w.norm();
  if (dist < r || dist <= Scalar(0)) return std::nullopt;
  const Vec2<Scalar> u = rotated<Scalar>(w / dist, -std::asin(r / dist));
  return Vec2<Scalar>(c + r * left_normal(u));
}

/// Outer tangent between two circles, both kept on the right.
template <typename Scalar>
std::optional<std::pair<Vec2<Scalar>, Vec2<Scalar>>> tangent_between(
    const Vec2<Scalar>& c1, Scalar r1, const Vec2<Scalar>& c2, Scalar r2) {
  const Vec2<Scalar> w = c2 - c1;
  const Scalar dist = w.norm();
  if (dist <= std::abs(r1 - r2)) return std::nullopt;
  const Vec2<Scalar> u = rotated<Scalar>(w / dist, -std::asin((r1 - r2) / dist));
  const Vec2<Scalar> n = left_normal(u);
  return std::pair<Vec2<Scalar>, Vec2<Scalar>>(c1 + r1 * n, c2 + r2 * n);
}

/// Clockwise sweep (radians) from `from` to `to` around `c`, in (-pi, pi].
template <typename Scalar>
Scalar clockwise_sweep(const Vec2<Scalar>& c, const Vec2<Scalar>& from,
                       const Vec2<Scalar>& to) {
  const Vec2<Scalar> a = from - c;
  const Vec2<Scalar> b = to - c;
  return wrap_angle(std::atan2(a.y(), a.x()) - std::atan2(b.y(), b.x()));
}

}  // namespace exo
