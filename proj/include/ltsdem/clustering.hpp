#pragma once

#include "ltsdem/broadphase.hpp"

#include <vector>

namespace ltsdem {

/// Particles sharing one time stamp and one step size for a sweep.
struct Cluster {
  std::vector<std::uint32_t> members;  // sorted particle ids
  double tCurrent = 0.0;
  double dt = 0.0;
  std::vector<std::uint32_t> statics;  // sorted static body ids
};

/// Connected components of c by iterated lowest-label propagation.
/// Clusters are ordered by their smallest member.
std::vector<Cluster> connectedComponents(const CollisionGraph& graph);

/// Rolls every member back to the earliest member time stamp and assigns
/// the smallest member step. Returns the number of particles rolled back.
std::size_t consolidate(Cluster& cluster, std::vector<Particle>& particles, const TimeStepPolicy& policy);

/// Lists the static bodies seen by any member. Statics never join clusters.
void attachStatics(Cluster& cluster, const CollisionGraph& graph);

}  // namespace ltsdem
