#pragma once

#include "ltsdem/mesh.hpp"

#include <vector>

namespace ltsdem {

/// One resolution of a surrogate hierarchy. Node k of level L carries a
/// triangle, its own halo width, and the bounding sphere of the bare
/// triangle (centroid + max corner distance).
struct SurrogateLevel {
  std::vector<std::array<Vec3, 3>> triangles;
  std::vector<double> epsilon;
  std::vector<Vec3> centroid;
  std::vector<double> radius;
  std::vector<std::uint32_t> parent;                 // into level L+1; empty on the root level
  std::vector<std::vector<std::uint32_t>> children;  // into level L-1; empty on level 0

  [[nodiscard]] std::size_t size() const { return triangles.size(); }
  [[nodiscard]] double maxEpsilon() const;
};

/// Hierarchy of progressively coarser triangle sets. Level 0 is the fine
/// mesh (triangle k of level 0 is triangle k of the mesh). Every node's
/// epsilon-hull contains the epsilon-hulls of all its children, and each
/// level is strictly smaller than the one below it.
class SurrogateTree {
 public:
  static constexpr int kDefaultFanout = 4;
  static constexpr int kMaxLevels = 8;

  SurrogateTree() = default;
  static SurrogateTree build(const TriangleMesh& mesh, double epsilon, int fanout = kDefaultFanout);

  [[nodiscard]] std::size_t levelCount() const { return levels_.size(); }
  [[nodiscard]] const SurrogateLevel& level(std::size_t k) const { return levels_[k]; }
  [[nodiscard]] const SurrogateLevel& fine() const { return levels_.front(); }
  [[nodiscard]] const SurrogateLevel& root() const { return levels_.back(); }
  [[nodiscard]] std::vector<std::size_t> levelSizes() const;
  [[nodiscard]] double fineEpsilon() const { return fineEpsilon_; }

 private:
  std::vector<SurrogateLevel> levels_;
  double fineEpsilon_ = 0.0;
};

}  // namespace ltsdem
