#include "ltsdem/broadphase.hpp"

#include "ltsdem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace ltsdem {

void TimeStepPolicy::validate() const {
  if (!(dtMax > 0.0)) throw InvalidArgument("dt_max must be positive");
  if (!(alpha > 1.0)) throw InvalidArgument("alpha must exceed 1");
}

double particleDt(const ParticleTimeline& timeline, const TimeStepPolicy& policy) {
  const double last = timeline.lastDt();
  if (last <= 0.0) return policy.dtMax;
  return std::min(policy.alpha * last, policy.dtMax);
}

Vec3 SpaceTimeTrack::centerAt(double t) const {
  if (isStatic) return currentCenter;
  if (t <= currentTime) {
    if (currentTime <= oldTime) return currentCenter;
    const double s = (t - oldTime) / (currentTime - oldTime);
    return (1.0 - s) * oldCenter + s * currentCenter;
  }
  if (dt <= 0.0) return currentCenter;
  const double s = (t - currentTime) / dt;
  return (1.0 - s) * currentCenter + s * predictedCenter;
}

SpaceTimeTrack makeTrack(const Particle& p, double dt) {
  const auto& tl = p.timeline;
  const BodyShape& shape = *p.shape;
  const ParticleState predicted = extrapolateFreeFlight(tl.current, dt);
  SpaceTimeTrack tr;
  tr.oldCenter = tl.old.pose().apply(shape.sphereCenter);
  tr.currentCenter = tl.current.pose().apply(shape.sphereCenter);
  tr.predictedCenter = predicted.pose().apply(shape.sphereCenter);
  tr.oldTime = tl.old.time;
  tr.currentTime = tl.current.time;
  tr.dt = dt;
  tr.radius = shape.sphereRadius;
  for (const Vec3& c : {tr.oldCenter, tr.currentCenter, tr.predictedCenter}) {
    tr.box.expand(c - Vec3::Constant(tr.radius));
    tr.box.expand(c + Vec3::Constant(tr.radius));
  }
  return tr;
}

SpaceTimeTrack makeTrack(const StaticBody& s) {
  SpaceTimeTrack tr;
  tr.isStatic = true;
  tr.oldCenter = tr.currentCenter = tr.predictedCenter = s.shape->sphereCenter;
  tr.oldTime = -kInf;
  tr.currentTime = kInf;
  tr.dt = kInf;
  tr.radius = s.shape->sphereRadius;
  tr.box = s.shape->box;
  return tr;
}

PairWindow pairWindow(const SpaceTimeTrack& a, const SpaceTimeTrack& b) {
  if (a.isStatic && b.isStatic) return {0.0, 0.0};
  if (b.isStatic) return {a.currentTime, a.currentTime + a.dt};
  if (a.isStatic) return {b.currentTime, b.currentTime + b.dt};
  const double start = std::min(a.currentTime, b.currentTime);
  return {start, start + std::min(a.dt, b.dt)};
}

bool checkSpacetimeAabb(const SpaceTimeTrack& a, const SpaceTimeTrack& b) {
  return a.box.overlaps(b.box);
}

double tubeMinimumDistance(const SpaceTimeTrack& a, const SpaceTimeTrack& b) {
  const PairWindow w = pairWindow(a, b);
  std::vector<double> cuts{w.start, w.end};
  for (double t : {a.currentTime, b.currentTime}) {
    if (t > w.start && t < w.end) cuts.push_back(t);
  }
  std::sort(cuts.begin(), cuts.end());
  double best = (a.centerAt(w.start) - b.centerAt(w.start)).norm();
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double u = cuts[k];
    const double v = cuts[k + 1];
    if (!(v > u)) continue;
    const Vec3 r0 = a.centerAt(u) - b.centerAt(u);
    const Vec3 r1 = a.centerAt(v) - b.centerAt(v);
    const Vec3 d = r1 - r0;
    const double s = closestOnLine(r0, d, 0.0, 1.0);
    best = std::min(best, (r0 + s * d).norm());
  }
  return best;
}

bool checkSpacetimeTube(const SpaceTimeTrack& a, const SpaceTimeTrack& b) {
  return tubeMinimumDistance(a, b) <= a.radius + b.radius;
}

bool CollisionGraph::hasEdge(std::uint32_t a, std::uint32_t b) const {
  if (a > b) std::swap(a, b);
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(a, b));
}

std::size_t CollisionGraph::staticLinkCount() const {
  std::size_t n = 0;
  for (const auto& l : staticLinks) n += l.size();
  return n;
}

namespace {

struct Tracks {
  std::vector<SpaceTimeTrack> dynamic;
  std::vector<SpaceTimeTrack> fixed;
  std::vector<double> dts;
};

Tracks makeTracks(const std::vector<Particle>& particles, const std::vector<StaticBody>& statics,
                  const TimeStepPolicy& policy) {
  Tracks t;
  t.dts.reserve(particles.size());
  t.dynamic.reserve(particles.size());
  for (const auto& p : particles) {
    const double dt = particleDt(p.timeline, policy);
    t.dts.push_back(dt);
    t.dynamic.push_back(makeTrack(p, dt));
  }
  for (const auto& s : statics) t.fixed.push_back(makeTrack(s));
  return t;
}

CollisionGraph confirmPairs(const Tracks& tracks, std::vector<std::pair<std::uint32_t, std::uint32_t>> candidates,
                            TaskPool* pool) {
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  const std::size_t n = tracks.dynamic.size();
  std::vector<char> keep(candidates.size(), 0);
  auto testPair = [&](std::size_t k) {
    const auto& a = tracks.dynamic[candidates[k].first];
    const auto& b = tracks.dynamic[candidates[k].second];
    keep[k] = checkSpacetimeAabb(a, b) && checkSpacetimeTube(a, b);
  };
  std::vector<std::vector<std::uint32_t>> links(n);
  auto testStatics = [&](std::size_t i) {
    for (std::uint32_t s = 0; s < tracks.fixed.size(); ++s) {
      const auto& a = tracks.dynamic[i];
      const auto& b = tracks.fixed[s];
      if (checkSpacetimeAabb(a, b) && checkSpacetimeTube(a, b)) links[i].push_back(s);
    }
  };
  if (pool) {
    pool->parallelFor(candidates.size(), testPair);
    pool->parallelFor(n, testStatics);
  } else {
    for (std::size_t k = 0; k < candidates.size(); ++k) testPair(k);
    for (std::size_t i = 0; i < n; ++i) testStatics(i);
  }

  CollisionGraph g;
  g.particleCount = n;
  g.particleDts = tracks.dts;
  g.staticLinks = std::move(links);
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (!keep[k]) continue;
    g.edges.push_back(candidates[k]);
    g.windows.push_back(pairWindow(tracks.dynamic[candidates[k].first], tracks.dynamic[candidates[k].second]));
  }
  return g;
}

}  // namespace

CollisionGraph buildCollisionGraph(const std::vector<Particle>& particles,
                                   const std::vector<StaticBody>& statics, const TimeStepPolicy& policy,
                                   TaskPool* pool) {
  const Tracks tracks = makeTracks(particles, statics, policy);
  const std::size_t n = particles.size();

  // uniform hash grid over the collapsed space-time boxes
  double meanExtent = 0.0;
  for (const auto& t : tracks.dynamic) meanExtent += t.box.extent().maxCoeff();
  meanExtent = n ? meanExtent / static_cast<double>(n) : 1.0;
  const double cell = std::max(2.0 * meanExtent, 1e-9);

  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> grid;
  std::vector<std::uint32_t> oversized;
  constexpr long kMaxCellsPerBox = 4096;
  auto key = [](long x, long y, long z) {
    return (static_cast<std::uint64_t>(x & 0x1fffff) << 42) | (static_cast<std::uint64_t>(y & 0x1fffff) << 21) |
           static_cast<std::uint64_t>(z & 0x1fffff);
  };
  for (std::uint32_t i = 0; i < n; ++i) {
    const Aabb& b = tracks.dynamic[i].box;
    const long x0 = static_cast<long>(std::floor(b.lo.x() / cell));
    const long y0 = static_cast<long>(std::floor(b.lo.y() / cell));
    const long z0 = static_cast<long>(std::floor(b.lo.z() / cell));
    const long x1 = static_cast<long>(std::floor(b.hi.x() / cell));
    const long y1 = static_cast<long>(std::floor(b.hi.y() / cell));
    const long z1 = static_cast<long>(std::floor(b.hi.z() / cell));
    if ((x1 - x0 + 1) * (y1 - y0 + 1) * (z1 - z0 + 1) > kMaxCellsPerBox) {
      oversized.push_back(i);
      continue;
    }
    for (long x = x0; x <= x1; ++x)
      for (long y = y0; y <= y1; ++y)
        for (long z = z0; z <= z1; ++z) grid[key(x, y, z)].push_back(i);
  }

  std::vector<std::pair<std::uint32_t, std::uint32_t>> candidates;
  for (const auto& [k, members] : grid) {
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const auto i = members[a];
        const auto j = members[b];
        if (tracks.dynamic[i].box.overlaps(tracks.dynamic[j].box)) {
          candidates.emplace_back(std::min(i, j), std::max(i, j));
        }
      }
    }
  }
  for (auto big : oversized) {
    for (std::uint32_t j = 0; j < n; ++j) {
      if (j != big) candidates.emplace_back(std::min(big, j), std::max(big, j));
    }
  }
  return confirmPairs(tracks, std::move(candidates), pool);
}

CollisionGraph buildCollisionGraphExhaustive(const std::vector<Particle>& particles,
                                             const std::vector<StaticBody>& statics,
                                             const TimeStepPolicy& policy) {
  const Tracks tracks = makeTracks(particles, statics, policy);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> all;
  for (std::uint32_t i = 0; i < particles.size(); ++i)
    for (std::uint32_t j = i + 1; j < particles.size(); ++j) all.emplace_back(i, j);
  return confirmPairs(tracks, std::move(all), nullptr);
}

}  // namespace ltsdem
