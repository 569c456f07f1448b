#include "ltsdem/ccd.hpp"

#include "ltsdem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <tuple>

namespace ltsdem {

Pose BodyMotion::poseAt(double t) const {
  if (isStatic()) return {};
  return extrapolateFreeFlight(state, std::max(0.0, t - state.time)).pose();
}

namespace {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  [[nodiscard]] bool empty() const { return lo > hi; }
};

/// Solution set of a s^2 + b s + c <= 0 (a >= 0) intersected with [0,1].
Interval quadraticInterval(double a, double b, double c) {
  if (a <= 1e-300) {
    if (std::abs(b) <= 1e-300) return c <= 0.0 ? Interval{0.0, 1.0} : Interval{1.0, 0.0};
    const double s = -c / b;
    return b > 0.0 ? Interval{0.0, std::min(1.0, s)} : Interval{std::max(0.0, s), 1.0};
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return {1.0, 0.0};
  const double sq = std::sqrt(disc);
  // numerically stable pair of roots
  const double q = -0.5 * (b + std::copysign(sq, b));
  double r1 = q / a;
  double r2 = q != 0.0 ? c / q : r1;
  if (r1 > r2) std::swap(r1, r2);
  return {std::max(0.0, r1), std::min(1.0, r2)};
}

Interval intersect(Interval a, Interval b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }

/// Earliest entry of p0 + s d into the ball (c, r).
std::optional<double> ballEntry(const Vec3& p0, const Vec3& d, const Vec3& c, double r) {
  const Vec3 q = p0 - c;
  const Interval iv = quadraticInterval(d.squaredNorm(), 2.0 * q.dot(d), q.squaredNorm() - r * r);
  if (iv.empty()) return std::nullopt;
  return iv.lo;
}

/// Earliest entry into the radius-r cylinder around segment e0 e1, capped
/// by the planes through the segment ends.
std::optional<double> capsuleBodyEntry(const Vec3& p0, const Vec3& d, const Vec3& e0, const Vec3& e1, double r) {
  const Vec3 u = e1 - e0;
  const double uu = u.squaredNorm();
  if (uu <= 1e-300) return std::nullopt;
  const Vec3 q = p0 - e0;
  const Vec3 qp = q - (q.dot(u) / uu) * u;
  const Vec3 dp = d - (d.dot(u) / uu) * u;
  Interval iv = quadraticInterval(dp.squaredNorm(), 2.0 * qp.dot(dp), qp.squaredNorm() - r * r);
  if (iv.empty()) return std::nullopt;
  // 0 <= (q + s d).u <= uu
  const double g0 = q.dot(u);
  const double gd = d.dot(u);
  iv = intersect(iv, quadraticInterval(0.0, -gd, -g0));
  iv = intersect(iv, quadraticInterval(0.0, gd, g0 - uu));
  if (iv.empty()) return std::nullopt;
  return iv.lo;
}

/// Cyrus-Beck clip against the slab prism of half height r over the triangle.
std::optional<double> prismEntry(const Vec3& p0, const Vec3& d, const std::array<Vec3, 3>& t, double r) {
  Vec3 n = (t[1] - t[0]).cross(t[2] - t[0]);
  const double len = n.norm();
  if (len <= 1e-300) return std::nullopt;
  n /= len;
  Interval iv{0.0, 1.0};
  auto clip = [&](const Vec3& m, double g0) {
    // half space m.x + g0 <= 0 along the segment
    const double gd = m.dot(d);
    const double at0 = m.dot(p0) + g0;
    iv = intersect(iv, quadraticInterval(0.0, gd, at0));
  };
  clip(n, -n.dot(t[0]) - r);
  clip(-n, n.dot(t[0]) - r);
  for (int k = 0; k < 3; ++k) {
    const Vec3& a = t[k];
    const Vec3& b = t[(k + 1) % 3];
    const Vec3 m = (b - a).cross(n);
    clip(m, -m.dot(a));
  }
  if (iv.empty()) return std::nullopt;
  return iv.lo;
}

void keepMin(std::optional<double>& best, std::optional<double> s) {
  if (s && (!best || *s < *best)) best = s;
}

/// Relative motion of a pair over one window: A's body frame seen from B
/// and the reverse, both at the window ends.
struct PairFrames {
  Pose ab0, ab1;  // A body -> B body
  Pose ba0, ba1;  // B body -> A body
  double r = 0.0;
  double spinA = 0.0;  // |w| * span, for optional inflation
  double spinB = 0.0;

  PairFrames(const BodyMotion& a, const BodyMotion& b, double t0, double t1) {
    const Pose pa0 = a.poseAt(t0), pa1 = a.poseAt(t1);
    const Pose pb0 = b.poseAt(t0), pb1 = b.poseAt(t1);
    ab0 = pb0.relativeOf(pa0);
    ab1 = pb1.relativeOf(pa1);
    ba0 = pa0.relativeOf(pb0);
    ba1 = pa1.relativeOf(pb1);
    r = a.shape->epsilon + b.shape->epsilon;
    if (!a.isStatic()) spinA = a.state.angularVelocity.norm() * (t1 - t0);
    if (!b.isStatic()) spinB = b.state.angularVelocity.norm() * (t1 - t0);
  }
};

double goldenMinimum(const auto& f, double lo, double hi, double tol, double& fmin) {
  constexpr double g = 0.6180339887498949;
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  if (f1 <= f2) {
    fmin = f1;
    return x1;
  }
  fmin = f2;
  return x2;
}

/// Smallest s in (lo, hi] with f(s) <= r given f(lo) > r >= f(hi).
double bisectCrossing(const auto& f, double lo, double hi, double r, double tol) {
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) <= r) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::optional<double> fineTime(const PairFrames& fr, const std::array<Vec3, 3>& ta, const std::array<Vec3, 3>& tb,
                               const CcdOptions& opt) {
  std::optional<double> best;
  std::array<Vec3, 3> a0, a1;
  for (int k = 0; k < 3; ++k) {
    a0[k] = fr.ab0.apply(ta[k]);
    a1[k] = fr.ab1.apply(ta[k]);
    keepMin(best, vertexTriangleContactTime(a0[k], a1[k], tb, fr.r));
  }
  for (int k = 0; k < 3; ++k) {
    keepMin(best, vertexTriangleContactTime(fr.ba0.apply(tb[k]), fr.ba1.apply(tb[k]), ta, fr.r));
  }
  if (best && *best == 0.0) return best;
  for (int i = 0; i < 3; ++i) {
    const int i1 = (i + 1) % 3;
    for (int j = 0; j < 3; ++j) {
      keepMin(best, edgeEdgeContactTime(a0[i], a1[i], a0[i1], a1[i1], tb[j], tb[(j + 1) % 3], fr.r, opt));
    }
  }
  return best;
}

/// Lower bound on the first fine contact time between the descendants of
/// two surrogate nodes, in window units; infinity if none can occur.
double nodeLowerBound(const PairFrames& fr, const SurrogateLevel& la, std::uint32_t ia, const SurrogateLevel& lb,
                      std::uint32_t ib, const CcdOptions& opt) {
  const Vec3& ca = la.centroid[ia];
  const Vec3& cb = lb.centroid[ib];
  double reach = la.radius[ia] + lb.radius[ib] + la.epsilon[ia] + lb.epsilon[ib];
  if (opt.rotationalInflation) {
    reach += fr.spinA * (la.radius[ia] + ca.norm()) + fr.spinB * (lb.radius[ib] + cb.norm());
  }
  double best = kInf;
  const Vec3 pa0 = fr.ab0.apply(ca);
  if (auto s = ballEntry(pa0, fr.ab1.apply(ca) - pa0, cb, reach)) best = *s;
  const Vec3 pb0 = fr.ba0.apply(cb);
  if (auto s = ballEntry(pb0, fr.ba1.apply(cb) - pb0, ca, reach)) best = std::min(best, *s);
  return best;
}

struct QueueEntry {
  double bound;
  std::uint32_t levelA, nodeA, levelB, nodeB;
  bool operator>(const QueueEntry& o) const {
    return std::tie(bound, levelA, nodeA, levelB, nodeB) > std::tie(o.bound, o.levelA, o.nodeA, o.levelB, o.nodeB);
  }
};

/// Number of equal pieces [t0, t1] is cut into so that the chord sag of the
/// relative motion stays below a quarter of the joint halo. Each body's
/// vertices are expressed in the other body's frame, so the sag grows with
/// the pair distance, not only with the body size.
struct Pieces {
  int count = 1;
  double sag = 0.0;  // chord sag bound per piece
};

Pieces windowPieces(const BodyMotion& a, const BodyMotion& b, double t0, double t1) {
  constexpr int kMaxPieces = 256;
  double spin = 0.0;
  if (!a.isStatic()) spin += a.state.angularVelocity.norm();
  if (!b.isStatic()) spin += b.state.angularVelocity.norm();
  spin *= t1 - t0;
  if (!(spin > 0.0)) return {};
  double reach = 0.0;
  for (double t : {t0, t1}) {
    const Vec3 ca = a.poseAt(t).apply(a.shape->sphereCenter);
    const Vec3 cb = b.poseAt(t).apply(b.shape->sphereCenter);
    reach = std::max(reach, (ca - cb).norm());
  }
  reach += a.shape->sphereRadius + b.shape->sphereRadius;
  const double r = a.shape->epsilon + b.shape->epsilon;
  // sag of a chord over angle th at distance D is about D th^2 / 8
  const double maxAngle = std::sqrt(2.0 * r / reach);
  Pieces p;
  p.count = std::clamp(static_cast<int>(std::ceil(spin / maxAngle)), 1, kMaxPieces);
  const double angle = spin / p.count;
  p.sag = reach * angle * angle / 8.0;
  return p;
}

/// Proximity slack for contacts at a hit found over [t0, t1].
double hitSlack(const BodyMotion& a, const BodyMotion& b, double t0, double t1) {
  const double r = a.shape->epsilon + b.shape->epsilon;
  return 1e-3 * r + windowPieces(a, b, t0, t1).sag;
}

/// Best-first descent of both trees under linear relative motion over
/// [t0, tEnd]; hits later than tBound are pruned.
std::optional<double> searchPiece(const BodyMotion& a, const BodyMotion& b, double t0, double tEnd, double tBound,
                                  const CcdOptions& opt, CcdStats* stats) {
  const double span = tEnd - t0;
  if (!(span > 0.0)) return std::nullopt;
  const PairFrames fr(a, b, t0, tEnd);
  const SurrogateTree& treeA = a.shape->tree;
  const SurrogateTree& treeB = b.shape->tree;
  double best = std::min(1.0, (tBound - t0) / span);
  bool hit = false;

  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> queue;
  auto push = [&](std::uint32_t la, std::uint32_t ia, std::uint32_t lb, std::uint32_t ib) {
    if (stats) ++stats->nodeTests;
    const double lbound = nodeLowerBound(fr, treeA.level(la), ia, treeB.level(lb), ib, opt);
    if (lbound <= best) queue.push({lbound, la, ia, lb, ib});
  };
  const auto rootA = static_cast<std::uint32_t>(treeA.levelCount() - 1);
  const auto rootB = static_cast<std::uint32_t>(treeB.levelCount() - 1);
  for (std::uint32_t i = 0; i < treeA.root().size(); ++i)
    for (std::uint32_t j = 0; j < treeB.root().size(); ++j) push(rootA, i, rootB, j);

  while (!queue.empty()) {
    const QueueEntry e = queue.top();
    queue.pop();
    if (e.bound > best) break;
    if (e.levelA == 0 && e.levelB == 0) {
      if (stats) ++stats->fineTests;
      const auto s = fineTime(fr, treeA.fine().triangles[e.nodeA], treeB.fine().triangles[e.nodeB], opt);
      if (s && *s <= best) {
        best = *s;
        hit = true;
      }
      continue;
    }
    const bool splitA = e.levelA > 0;
    const bool splitB = e.levelB > 0;
    const std::vector<std::uint32_t> selfA{e.nodeA};
    const std::vector<std::uint32_t> selfB{e.nodeB};
    const auto& kidsA = splitA ? treeA.level(e.levelA).children[e.nodeA] : selfA;
    const auto& kidsB = splitB ? treeB.level(e.levelB).children[e.nodeB] : selfB;
    const std::uint32_t la = splitA ? e.levelA - 1 : 0;
    const std::uint32_t lb = splitB ? e.levelB - 1 : 0;
    for (auto i : kidsA)
      for (auto j : kidsB) push(la, i, lb, j);
  }
  if (!hit) return std::nullopt;
  return t0 + best * span;
}

std::optional<double> searchPair(const BodyMotion& a, const BodyMotion& b, double t0, double tEnd, double tBound,
                                 const CcdOptions& opt, CcdStats* stats) {
  const int n = windowPieces(a, b, t0, tEnd).count;
  for (int k = 0; k < n; ++k) {
    const double lo = t0 + (tEnd - t0) * k / n;
    const double hi = k + 1 == n ? tEnd : t0 + (tEnd - t0) * (k + 1) / n;
    if (lo > tBound) break;
    if (auto t = searchPiece(a, b, lo, hi, tBound, opt, stats)) return t;
  }
  return std::nullopt;
}

ContactPoint makeContact(const std::array<Vec3, 3>& ta, const std::array<Vec3, 3>& tb, const Vec3& normalB,
                         double r, double threshold) {
  ContactPoint c;
  const geom::ClosestPair cp = geom::triangleTriangle(ta, tb);
  // center the contact on all feature pairs within reach
  Vec3 sum = Vec3::Zero();
  int count = 0;
  auto take = [&](const Vec3& p, const Vec3& q) {
    if ((p - q).norm() <= threshold) {
      sum += 0.5 * (p + q);
      ++count;
    }
  };
  for (int k = 0; k < 3; ++k) {
    take(ta[k], geom::closestPointOnTriangle(ta[k], tb[0], tb[1], tb[2]));
    take(tb[k], geom::closestPointOnTriangle(tb[k], ta[0], ta[1], ta[2]));
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const auto ee = geom::segmentSegment(ta[i], ta[(i + 1) % 3], tb[j], tb[(j + 1) % 3]);
      take(ee.onFirst, ee.onSecond);
    }
  }
  c.position = count ? Vec3(sum / count) : Vec3(0.5 * (cp.onFirst + cp.onSecond));
  const double scale = std::max({(ta[1] - ta[0]).norm(), (tb[1] - tb[0]).norm(), 1e-300});
  if (cp.distance > 1e-9 * scale) {
    c.normal = (cp.onFirst - cp.onSecond) / cp.distance;
  } else {
    c.normal = normalB;
  }
  c.depth = std::max(0.0, r - cp.distance);
  return c;
}

}  // namespace

std::optional<double> vertexTriangleContactTime(const Vec3& p0, const Vec3& p1, const std::array<Vec3, 3>& tri,
                                                double r) {
  const Vec3 d = p1 - p0;
  std::optional<double> best;
  keepMin(best, prismEntry(p0, d, tri, r));
  for (int k = 0; k < 3; ++k) {
    keepMin(best, capsuleBodyEntry(p0, d, tri[k], tri[(k + 1) % 3], r));
    keepMin(best, ballEntry(p0, d, tri[k], r));
  }
  return best;
}

std::optional<double> edgeEdgeContactTime(const Vec3& a00, const Vec3& a01, const Vec3& a10, const Vec3& a11,
                                          const Vec3& b0, const Vec3& b1, double r, const CcdOptions& opt) {
  // quick reject: midpoint sphere of the moving edge against the fixed one
  const Vec3 m0 = 0.5 * (a00 + a10);
  const Vec3 m1 = 0.5 * (a01 + a11);
  const Vec3 mb = 0.5 * (b0 + b1);
  const double ha = 0.5 * std::max((a10 - a00).norm(), (a11 - a01).norm());
  const double hb = 0.5 * (b1 - b0).norm();
  const double sm = closestOnLine(m0 - mb, m1 - m0, 0.0, 1.0);
  if ((m0 - mb + sm * (m1 - m0)).norm() > ha + hb + r) return std::nullopt;

  auto f = [&](double s) {
    return geom::segmentSegment((1.0 - s) * a00 + s * a01, (1.0 - s) * a10 + s * a11, b0, b1).distance;
  };
  const int n = std::max(2, opt.edgeSamples);
  std::vector<double> xs(n), fs(n);
  for (int k = 0; k < n; ++k) {
    xs[k] = static_cast<double>(k) / (n - 1);
    fs[k] = f(xs[k]);
  }
  if (fs[0] <= r) return 0.0;

  std::optional<double> best;
  for (int k = 1; k < n; ++k) {
    if (fs[k] <= r) {
      keepMin(best, bisectCrossing(f, xs[k - 1], xs[k], r, opt.timeTol));
      break;
    }
  }
  for (int k = 0; k < n; ++k) {
    const bool leftLower = k > 0 && fs[k - 1] < fs[k];
    const bool rightLower = k + 1 < n && fs[k + 1] < fs[k];
    if (leftLower || rightLower || fs[k] <= r) continue;
    const double lo = xs[std::max(k - 1, 0)];
    const double hi = xs[std::min(k + 1, n - 1)];
    if (best && lo >= *best) break;
    double fmin = 0.0;
    const double xm = goldenMinimum(f, lo, hi, opt.timeTol, fmin);
    if (fmin <= r) keepMin(best, f(lo) <= r ? lo : bisectCrossing(f, lo, xm, r, opt.timeTol));
  }
  return best;
}

std::optional<double> trianglePairContactTime(const BodyMotion& a, std::uint32_t ta, const BodyMotion& b,
                                              std::uint32_t tb, double t0, double t1, const CcdOptions& opt) {
  const int n = windowPieces(a, b, t0, t1).count;
  for (int k = 0; k < n; ++k) {
    const double lo = t0 + (t1 - t0) * k / n;
    const double hi = k + 1 == n ? t1 : t0 + (t1 - t0) * (k + 1) / n;
    const PairFrames fr(a, b, lo, hi);
    if (auto s = fineTime(fr, a.shape->tree.fine().triangles[ta], b.shape->tree.fine().triangles[tb], opt)) {
      return (lo + *s * (hi - lo) - t0) / (t1 - t0);
    }
  }
  return std::nullopt;
}

std::optional<PairHit> pairEarliestContact(const BodyMotion& a, const BodyMotion& b, double t0, double bound,
                                           const CcdOptions& opt, CcdStats* stats) {
  const auto t = searchPair(a, b, t0, bound, bound, opt, stats);
  if (!t) return std::nullopt;
  PairHit hit;
  hit.time = *t;
  hit.contacts = proximityContacts(a, b, *t, hitSlack(a, b, t0, bound), stats);
  return hit;
}

std::optional<double> pairEarliestContactExhaustive(const BodyMotion& a, const BodyMotion& b, double t0,
                                                    double bound, const CcdOptions& opt) {
  const double span = bound - t0;
  if (!(span > 0.0)) return std::nullopt;
  const auto& fa = a.shape->tree.fine().triangles;
  const auto& fb = b.shape->tree.fine().triangles;
  auto balls = [](const std::vector<std::array<Vec3, 3>>& tris) {
    std::vector<std::pair<Vec3, double>> out;
    for (const auto& t : tris) {
      const Vec3 c = (t[0] + t[1] + t[2]) / 3.0;
      out.emplace_back(c, std::max({(t[0] - c).norm(), (t[1] - c).norm(), (t[2] - c).norm()}));
    }
    return out;
  };
  const auto ballA = balls(fa), ballB = balls(fb);
  const int n = windowPieces(a, b, t0, bound).count;
  for (int k = 0; k < n; ++k) {
    const double lo = t0 + span * k / n;
    const double hi = k + 1 == n ? bound : t0 + span * (k + 1) / n;
    const PairFrames fr(a, b, lo, hi);
    std::optional<double> best;
    for (std::size_t i = 0; i < fa.size(); ++i) {
      const Vec3 pa0 = fr.ab0.apply(ballA[i].first);
      const Vec3 da = fr.ab1.apply(ballA[i].first) - pa0;
      for (std::size_t j = 0; j < fb.size(); ++j) {
        // every feature stays inside its triangle ball along the chords
        const double reach = ballA[i].second + ballB[j].second + fr.r;
        const Vec3 pb0 = fr.ba0.apply(ballB[j].first);
        auto enter = ballEntry(pa0, da, ballB[j].first, reach);
        keepMin(enter, ballEntry(pb0, fr.ba1.apply(ballB[j].first) - pb0, ballA[i].first, reach));
        if (!enter || (best && *enter > *best)) continue;
        keepMin(best, fineTime(fr, fa[i], fb[j], opt));
      }
    }
    if (best) return lo + *best * (hi - lo);
  }
  return std::nullopt;
}

std::vector<ContactPoint> proximityContacts(const BodyMotion& a, const BodyMotion& b, double t, double slack,
                                            CcdStats* stats) {
  const Pose pa = a.poseAt(t);
  const Pose pb = b.poseAt(t);
  const SurrogateTree& treeA = a.shape->tree;
  const SurrogateTree& treeB = b.shape->tree;
  const double r = a.shape->epsilon + b.shape->epsilon;
  const double threshold = r + slack;

  auto world = [](const Pose& p, const std::array<Vec3, 3>& t) {
    return std::array<Vec3, 3>{p.apply(t[0]), p.apply(t[1]), p.apply(t[2])};
  };
  auto near = [&](std::uint32_t la, std::uint32_t ia, std::uint32_t lb, std::uint32_t ib) {
    if (stats) ++stats->nodeTests;
    const auto& A = treeA.level(la);
    const auto& B = treeB.level(lb);
    const double reach = A.radius[ia] + B.radius[ib] + A.epsilon[ia] + B.epsilon[ib] + slack;
    return (pa.apply(A.centroid[ia]) - pb.apply(B.centroid[ib])).norm() <= reach;
  };

  std::vector<ContactPoint> out;
  std::vector<std::array<std::uint32_t, 4>> stack;
  const auto rootA = static_cast<std::uint32_t>(treeA.levelCount() - 1);
  const auto rootB = static_cast<std::uint32_t>(treeB.levelCount() - 1);
  for (auto i = static_cast<std::uint32_t>(treeA.root().size()); i-- > 0;)
    for (auto j = static_cast<std::uint32_t>(treeB.root().size()); j-- > 0;)
      if (near(rootA, i, rootB, j)) stack.push_back({rootA, i, rootB, j});

  while (!stack.empty()) {
    const auto [la, ia, lb, ib] = stack.back();
    stack.pop_back();
    if (la == 0 && lb == 0) {
      if (stats) ++stats->fineTests;
      const auto ta = world(pa, treeA.fine().triangles[ia]);
      const auto tb = world(pb, treeB.fine().triangles[ib]);
      if (geom::triangleTriangle(ta, tb).distance > threshold) continue;
      const Vec3 nb = pb.rotation * b.shape->mesh.faceNormal(ib);
      ContactPoint c = makeContact(ta, tb, nb, r, threshold);
      c.time = t;
      c.triangleA = ia;
      c.triangleB = ib;
      c.bodyA = a.ref;
      c.bodyB = b.ref;
      out.push_back(c);
      continue;
    }
    const bool splitA = la > 0;
    const bool splitB = lb > 0;
    const std::vector<std::uint32_t> selfA{ia};
    const std::vector<std::uint32_t> selfB{ib};
    const auto& kidsA = splitA ? treeA.level(la).children[ia] : selfA;
    const auto& kidsB = splitB ? treeB.level(lb).children[ib] : selfB;
    const std::uint32_t ca = splitA ? la - 1 : 0;
    const std::uint32_t cb = splitB ? lb - 1 : 0;
    for (auto i = kidsA.rbegin(); i != kidsA.rend(); ++i)
      for (auto j = kidsB.rbegin(); j != kidsB.rend(); ++j)
        if (near(ca, *i, cb, *j)) stack.push_back({ca, *i, cb, *j});
  }
  std::sort(out.begin(), out.end(), [](const ContactPoint& x, const ContactPoint& y) {
    return std::tie(x.triangleA, x.triangleB) < std::tie(y.triangleA, y.triangleB);
  });
  return out;
}

std::vector<ContactPoint> filterContacts(const std::vector<ContactPoint>& raw, double radius) {
  std::map<std::pair<BodyRef, BodyRef>, std::vector<ContactPoint>> byPair;
  for (const auto& c : raw) byPair[{c.bodyA, c.bodyB}].push_back(c);

  std::vector<ContactPoint> out;
  for (auto& [key, group] : byPair) {
    std::sort(group.begin(), group.end(), [](const ContactPoint& x, const ContactPoint& y) {
      return std::tie(x.triangleA, x.triangleB, x.time) < std::tie(y.triangleA, y.triangleB, y.time);
    });
    const std::size_t n = group.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t i) {
      while (parent[i] != i) i = parent[i] = parent[parent[i]];
      return i;
    };
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if ((group[i].position - group[j].position).norm() <= radius) {
          const std::size_t ri = find(i), rj = find(j);
          if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
        }
      }
    }
    std::vector<std::vector<std::size_t>> members(n);
    for (std::size_t i = 0; i < n; ++i) members[find(i)].push_back(i);
    for (std::size_t root = 0; root < n; ++root) {
      const auto& m = members[root];
      if (m.empty()) continue;
      ContactPoint fused = group[m.front()];
      Vec3 pos = Vec3::Zero();
      Vec3 nrm = Vec3::Zero();
      double deepest = -kInf;
      for (auto i : m) {
        const ContactPoint& c = group[i];
        pos += c.position;
        nrm += c.normal;
        fused.time = std::min(fused.time, c.time);
        if (c.depth > deepest) {
          deepest = c.depth;
          fused.triangleA = c.triangleA;
          fused.triangleB = c.triangleB;
          fused.normal = c.normal;
        }
      }
      fused.position = pos / static_cast<double>(m.size());
      if (nrm.norm() > 1e-12) fused.normal = nrm.normalized();
      fused.depth = deepest;
      out.push_back(fused);
    }
  }
  return out;
}

EffectiveDt computeEffectiveDt(const std::vector<BodyMotion>& bodies,
                               const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs, double t0,
                               double clusterDt, const CcdOptions& opt, CcdStats* stats) {
  EffectiveDt result;
  double bound = t0 + clusterDt;
  double searched = bound;  // window end of the search that produced bound
  while (result.narrowingIters < opt.maxNarrowing) {
    ++result.narrowingIters;
    const double end = bound;
    double next = bound;
    for (const auto& [i, j] : pairs) {
      if (auto t = searchPair(bodies[i], bodies[j], t0, end, next, opt, stats)) next = std::min(next, *t);
    }
    if (!(next < bound)) break;
    result.collision = true;
    const double change = bound - next;
    bound = next;
    searched = end;
    if (change < opt.narrowingTol * clusterDt) break;
  }

  if (!result.collision) {
    result.dt = clusterDt;
    return result;
  }
  const double found = bound - t0;
  result.dt = std::clamp(found * (1.0 + opt.widen), 1e-9 * clusterDt, clusterDt);

  std::vector<ContactPoint> raw;
  double radius = kInf;
  for (const auto& [i, j] : pairs) {
    const double r = bodies[i].shape->epsilon + bodies[j].shape->epsilon;
    radius = std::min(radius, 0.5 * r);
    auto cs = proximityContacts(bodies[i], bodies[j], bound, hitSlack(bodies[i], bodies[j], t0, searched), stats);
    raw.insert(raw.end(), cs.begin(), cs.end());
  }
  result.contacts = filterContacts(raw, radius);
  return result;
}

}  // namespace ltsdem
