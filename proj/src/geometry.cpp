#include "ltsdem/geometry.hpp"

#include <cmath>

namespace ltsdem::geom {

Vec3 closestPointOnTriangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return a + v * ab;
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return a + w * ac;
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return b + w * (c - b);
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return a + ab * v + ac * w;
}

ClosestPair segmentSegment(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
  const Vec3 d1 = p1 - p0;
  const Vec3 d2 = q1 - q0;
  const Vec3 r = p0 - q0;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  constexpr double tiny = 1e-300;
  double s = 0.0;
  double t = 0.0;
  if (a <= tiny && e <= tiny) {
    // both degenerate
  } else if (a <= tiny) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= tiny) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 1e-14 * a * e ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  ClosestPair out;
  out.onFirst = p0 + s * d1;
  out.onSecond = q0 + t * d2;
  out.distance = (out.onFirst - out.onSecond).norm();
  return out;
}

double segmentTriangleIntersection(const Vec3& p0, const Vec3& p1, const Vec3& a, const Vec3& b,
                                   const Vec3& c) {
  // Moeller-Trumbore restricted to the segment
  const Vec3 dir = p1 - p0;
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 h = dir.cross(e2);
  const double det = e1.dot(h);
  if (std::abs(det) < 1e-300) return -1.0;
  const double inv = 1.0 / det;
  const Vec3 s = p0 - a;
  const double u = inv * s.dot(h);
  if (u < 0.0 || u > 1.0) return -1.0;
  const Vec3 q = s.cross(e1);
  const double v = inv * dir.dot(q);
  if (v < 0.0 || u + v > 1.0) return -1.0;
  const double t = inv * e2.dot(q);
  return (t >= 0.0 && t <= 1.0) ? t : -1.0;
}

ClosestPair triangleTriangle(const std::array<Vec3, 3>& t1, const std::array<Vec3, 3>& t2) {
  ClosestPair best;
  for (int k = 0; k < 3; ++k) {
    const Vec3& p0 = t1[k];
    const Vec3& p1 = t1[(k + 1) % 3];
    const double hit = segmentTriangleIntersection(p0, p1, t2[0], t2[1], t2[2]);
    if (hit >= 0.0) {
      const Vec3 x = p0 + hit * (p1 - p0);
      return {x, x, 0.0};
    }
    const Vec3& q0 = t2[k];
    const Vec3& q1 = t2[(k + 1) % 3];
    const double hit2 = segmentTriangleIntersection(q0, q1, t1[0], t1[1], t1[2]);
    if (hit2 >= 0.0) {
      const Vec3 x = q0 + hit2 * (q1 - q0);
      return {x, x, 0.0};
    }
  }
  for (int k = 0; k < 3; ++k) {
    const Vec3 c2 = closestPointOnTriangle(t1[k], t2[0], t2[1], t2[2]);
    const double d2 = (t1[k] - c2).norm();
    if (d2 < best.distance) best = {t1[k], c2, d2};
    const Vec3 c1 = closestPointOnTriangle(t2[k], t1[0], t1[1], t1[2]);
    const double d1 = (t2[k] - c1).norm();
    if (d1 < best.distance) best = {c1, t2[k], d1};
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const ClosestPair e = segmentSegment(t1[i], t1[(i + 1) % 3], t2[j], t2[(j + 1) % 3]);
      if (e.distance < best.distance) best = e;
    }
  }
  return best;
}

}  // namespace ltsdem::geom
