#pragma once

#include "ltsdem/math.hpp"

namespace ltsdem::geom {

struct ClosestPair {
  Vec3 onFirst = Vec3::Zero();
  Vec3 onSecond = Vec3::Zero();
  double distance = kInf;
};

/// Closest point on triangle abc to p (Voronoi region walk).
Vec3 closestPointOnTriangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

inline double pointTriangleDistance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  return (p - closestPointOnTriangle(p, a, b, c)).norm();
}

/// Closest points between segments p0p1 and q0q1.
ClosestPair segmentSegment(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1);

/// Parameter where segment p0p1 pierces triangle abc, or negative.
double segmentTriangleIntersection(const Vec3& p0, const Vec3& p1, const Vec3& a, const Vec3& b,
                                   const Vec3& c);

/// Exact triangle-triangle distance with one pair of closest points.
ClosestPair triangleTriangle(const std::array<Vec3, 3>& t1, const std::array<Vec3, 3>& t2);

}  // namespace ltsdem::geom
