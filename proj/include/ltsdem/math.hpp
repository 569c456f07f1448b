#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>

namespace ltsdem {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

using BodyId = std::uint32_t;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Axis-aligned box. Empty boxes have lo > hi.
struct Aabb {
  Vec3 lo = Vec3::Constant(kInf);
  Vec3 hi = Vec3::Constant(-kInf);

  void expand(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void expand(const Aabb& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  void inflate(double r) {
    lo.array() -= r;
    hi.array() += r;
  }
  [[nodiscard]] bool empty() const { return (lo.array() > hi.array()).any(); }
  [[nodiscard]] bool overlaps(const Aabb& o) const {
    return (lo.array() <= o.hi.array()).all() && (o.lo.array() <= hi.array()).all();
  }
  [[nodiscard]] Vec3 extent() const { return hi - lo; }
};

/// Rigid transform: world = rotation * body + translation.
struct Pose {
  Quat rotation = Quat::Identity();
  Vec3 translation = Vec3::Zero();

  [[nodiscard]] Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  [[nodiscard]] Vec3 applyInverse(const Vec3& p) const {
    return rotation.conjugate() * (p - translation);
  }
  /// this^-1 * other, i.e. maps other's body frame into this body frame.
  [[nodiscard]] Pose relativeOf(const Pose& other) const {
    Pose r;
    r.rotation = (rotation.conjugate() * other.rotation).normalized();
    r.translation = rotation.conjugate() * (other.translation - translation);
    return r;
  }
};

/// Rotation by the axis-angle vector w * dt.
inline Quat expMap(const Vec3& w, double dt) {
  const double angle = w.norm() * dt;
  if (angle < 1e-300) return Quat::Identity();
  return Quat(Eigen::AngleAxisd(angle, w.normalized()));
}

/// Slerp along the shortest arc. s in [0,1].
inline Quat slerpShortest(const Quat& a, const Quat& b, double s) {
  if (s == 0.0) return a;
  if (s == 1.0) return b;
  Quat bb = b;
  double d = a.dot(b);
  if (d < 0.0) {
    bb.coeffs() = -bb.coeffs();
    d = -d;
  }
  if (d > 1.0 - 1e-12) {
    Quat r;
    r.coeffs() = (1.0 - s) * a.coeffs() + s * bb.coeffs();
    return r.normalized();
  }
  const double theta = std::acos(std::min(d, 1.0));
  const double sinTheta = std::sin(theta);
  const double wa = std::sin((1.0 - s) * theta) / sinTheta;
  const double wb = std::sin(s * theta) / sinTheta;
  Quat r;
  r.coeffs() = wa * a.coeffs() + wb * bb.coeffs();
  return r.normalized();
}

/// Minimum of |p0 + s*d| over s in [lo, hi]; returns the argmin.
inline double closestOnLine(const Vec3& p0, const Vec3& d, double lo, double hi) {
  const double dd = d.squaredNorm();
  if (dd <= 0.0) return lo;
  return std::clamp(-p0.dot(d) / dd, lo, hi);
}

}  // namespace ltsdem
