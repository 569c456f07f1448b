#pragma once

#include "ltsdem/body.hpp"
#include "ltsdem/parallel.hpp"

#include <utility>
#include <vector>

namespace ltsdem {

struct TimeStepPolicy {
  double dtMax = 1.0;
  double alpha = 2.0;

  void validate() const;
};

/// Damped particle step: min(alpha * (t_current - t_old), dtMax), or dtMax
/// when the particle has no history yet.
double particleDt(const ParticleTimeline& timeline, const TimeStepPolicy& policy);

/// Bounding sphere of one body swept along its two-segment space-time path
/// old -> current -> current + dt. Static bodies never move and have an
/// unbounded time span.
struct SpaceTimeTrack {
  Vec3 oldCenter = Vec3::Zero();
  Vec3 currentCenter = Vec3::Zero();
  Vec3 predictedCenter = Vec3::Zero();
  double oldTime = 0.0;
  double currentTime = 0.0;
  double dt = 0.0;
  double radius = 0.0;
  Aabb box;  // union over the three poses, halo included
  bool isStatic = false;

  [[nodiscard]] Vec3 centerAt(double t) const;
};

SpaceTimeTrack makeTrack(const Particle& p, double dt);
SpaceTimeTrack makeTrack(const StaticBody& s);

struct PairWindow {
  double start = 0.0;
  double end = 0.0;
};

/// Window over which the pair's c-statement holds: starts at the earlier of
/// the two current times and spans the smaller particle step.
PairWindow pairWindow(const SpaceTimeTrack& a, const SpaceTimeTrack& b);

/// Check 1: the space-time boxes, collapsed along time, overlap.
bool checkSpacetimeAabb(const SpaceTimeTrack& a, const SpaceTimeTrack& b);

/// Minimum distance between the two sphere centers over the pair window.
double tubeMinimumDistance(const SpaceTimeTrack& a, const SpaceTimeTrack& b);

/// Check 2: the sphere hoses come within r_a + r_b during the pair window.
bool checkSpacetimeTube(const SpaceTimeTrack& a, const SpaceTimeTrack& b);

struct CollisionGraph {
  std::size_t particleCount = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // sorted, first < second
  std::vector<PairWindow> windows;                              // parallel to edges
  std::vector<std::vector<std::uint32_t>> staticLinks;          // per particle, sorted
  std::vector<double> particleDts;                              // per particle

  [[nodiscard]] bool hasEdge(std::uint32_t a, std::uint32_t b) const;
  [[nodiscard]] std::size_t staticLinkCount() const;
};

/// Builds c from all particle pairs whose boxes share a spatial-hash cell.
/// The result does not depend on the pool's thread count.
CollisionGraph buildCollisionGraph(const std::vector<Particle>& particles,
                                   const std::vector<StaticBody>& statics, const TimeStepPolicy& policy,
                                   TaskPool* pool = nullptr);

/// Reference construction testing all pairs; used to validate the hashed one.
CollisionGraph buildCollisionGraphExhaustive(const std::vector<Particle>& particles,
                                             const std::vector<StaticBody>& statics,
                                             const TimeStepPolicy& policy);

}  // namespace ltsdem
