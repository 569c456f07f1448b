#include "ltsdem/clustering.hpp"

#include <algorithm>
#include <numeric>

namespace ltsdem {

std::vector<Cluster> connectedComponents(const CollisionGraph& graph) {
  const std::size_t n = graph.particleCount;
  std::vector<std::uint32_t> label(n);
  std::iota(label.begin(), label.end(), 0u);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [a, b] : graph.edges) {
      const std::uint32_t low = std::min(label[a], label[b]);
      if (label[a] != low || label[b] != low) {
        label[a] = label[b] = low;
        changed = true;
      }
    }
  }

  std::vector<Cluster> clusters;
  std::vector<std::int64_t> slot(n, -1);
  for (std::uint32_t i = 0; i < n; ++i) {
    // labels are component minima, so the label owner is seen first
    const std::uint32_t root = label[i];
    if (slot[root] < 0) {
      slot[root] = static_cast<std::int64_t>(clusters.size());
      clusters.emplace_back();
    }
    clusters[static_cast<std::size_t>(slot[root])].members.push_back(i);
  }
  return clusters;
}

std::size_t consolidate(Cluster& cluster, std::vector<Particle>& particles, const TimeStepPolicy& policy) {
  double t = kInf;
  double dt = kInf;
  for (auto m : cluster.members) {
    t = std::min(t, particles[m].timeline.current.time);
    dt = std::min(dt, particleDt(particles[m].timeline, policy));
  }
  std::size_t rolled = 0;
  for (auto m : cluster.members) {
    auto& tl = particles[m].timeline;
    if (tl.current.time > t) {
      tl = rollback(tl, t);
      ++rolled;
    }
  }
  cluster.tCurrent = t;
  cluster.dt = dt;
  return rolled;
}

void attachStatics(Cluster& cluster, const CollisionGraph& graph) {
  cluster.statics.clear();
  for (auto m : cluster.members) {
    const auto& links = graph.staticLinks[m];
    cluster.statics.insert(cluster.statics.end(), links.begin(), links.end());
  }
  std::sort(cluster.statics.begin(), cluster.statics.end());
  cluster.statics.erase(std::unique(cluster.statics.begin(), cluster.statics.end()), cluster.statics.end());
}

}  // namespace ltsdem
