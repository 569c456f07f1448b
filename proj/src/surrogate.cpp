#include "ltsdem/surrogate.hpp"

#include "ltsdem/errors.hpp"
#include "ltsdem/geometry.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>

namespace ltsdem {

double SurrogateLevel::maxEpsilon() const {
  return epsilon.empty() ? 0.0 : *std::max_element(epsilon.begin(), epsilon.end());
}

namespace {

std::uint64_t spreadBits(std::uint64_t v) {
  v &= 0x1fffff;
  v = (v | v << 32) & 0x1f00000000ffffULL;
  v = (v | v << 16) & 0x1f0000ff0000ffULL;
  v = (v | v << 8) & 0x100f00f00f00f00fULL;
  v = (v | v << 4) & 0x10c30c30c30c30c3ULL;
  v = (v | v << 2) & 0x1249249249249249ULL;
  return v;
}

std::uint64_t mortonCode(const Vec3& p, const Aabb& box) {
  const Vec3 ext = box.extent().cwiseMax(Vec3::Constant(1e-300));
  std::uint64_t code = 0;
  for (int k = 0; k < 3; ++k) {
    const double unit = std::clamp((p[k] - box.lo[k]) / ext[k], 0.0, 1.0);
    code |= spreadBits(static_cast<std::uint64_t>(unit * 2097151.0)) << k;
  }
  return code;
}

void finishNode(SurrogateLevel& level, std::size_t k) {
  const auto& t = level.triangles[k];
  level.centroid[k] = (t[0] + t[1] + t[2]) / 3.0;
  level.radius[k] = 0.0;
  for (const auto& c : t) level.radius[k] = std::max(level.radius[k], (c - level.centroid[k]).norm());
}

/// Triangle in the best-fit plane of `points` that encloses their in-plane
/// projection.
std::array<Vec3, 3> enclosingPlaneTriangle(const std::vector<Vec3>& points) {
  Vec3 mean = Vec3::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Mat3 cov = Mat3::Zero();
  for (const auto& p : points) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  // eigenvalues ascending: column 0 is the plane normal, column 2 the major axis
  Vec3 n = eig.eigenvectors().col(0).normalized();
  Vec3 u = eig.eigenvectors().col(2).normalized();
  Vec3 v = n.cross(u).normalized();

  double u0 = kInf, u1 = -kInf, v0 = kInf, v1 = -kInf;
  for (const auto& p : points) {
    const Vec3 d = p - mean;
    u0 = std::min(u0, d.dot(u));
    u1 = std::max(u1, d.dot(u));
    v0 = std::min(v0, d.dot(v));
    v1 = std::max(v1, d.dot(v));
  }
  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, (p - mean).norm());
  const double floor = std::max(scale, 1e-12) * 1e-6;
  double w = std::max(u1 - u0, floor);
  double h = std::max(v1 - v0, floor);
  auto at = [&](double a, double b) -> Vec3 { return mean + a * u + b * v; };
  // rectangle [0,w]x[0,h] lies inside (-w/2,0), (3w/2,0), (w/2,2h)
  return {at(u0 - 0.5 * w, v0), at(u0 + 1.5 * w, v0), at(u0 + 0.5 * w, v0 + 2.0 * h)};
}

}  // namespace

SurrogateTree SurrogateTree::build(const TriangleMesh& mesh, double epsilon, int fanout) {
  if (fanout < 2) throw InvalidArgument("surrogate fanout must be >= 2");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (mesh.triangles.empty()) throw InvalidArgument("surrogate tree of an empty mesh");

  SurrogateTree tree;
  tree.fineEpsilon_ = epsilon;
  SurrogateLevel fine;
  const std::size_t n = mesh.size();
  fine.triangles.resize(n);
  fine.epsilon.assign(n, epsilon);
  fine.centroid.resize(n);
  fine.radius.resize(n);
  fine.children.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    fine.triangles[k] = mesh.corners(k);
    finishNode(fine, k);
  }
  tree.levels_.push_back(std::move(fine));

  while (tree.levels_.back().size() > 1 && static_cast<int>(tree.levels_.size()) < kMaxLevels) {
    SurrogateLevel& child = tree.levels_.back();
    const std::size_t m = child.size();

    Aabb box;
    for (const auto& c : child.centroid) box.expand(c);
    std::vector<std::uint64_t> codes(m);
    for (std::size_t k = 0; k < m; ++k) codes[k] = mortonCode(child.centroid[k], box);
    std::vector<std::uint32_t> order(m);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return codes[a] < codes[b]; });

    SurrogateLevel parent;
    child.parent.assign(m, 0);
    for (std::size_t start = 0; start < m; start += static_cast<std::size_t>(fanout)) {
      const std::size_t end = std::min(m, start + static_cast<std::size_t>(fanout));
      std::vector<std::uint32_t> group(order.begin() + static_cast<long>(start),
                                       order.begin() + static_cast<long>(end));
      std::array<Vec3, 3> tri;
      double eps = 0.0;
      if (group.size() == 1) {
        tri = child.triangles[group[0]];
        eps = child.epsilon[group[0]];
      } else {
        std::vector<Vec3> pts;
        for (auto g : group) {
          for (const auto& c : child.triangles[g]) pts.push_back(c);
        }
        tri = enclosingPlaneTriangle(pts);
        // distance to a convex set is convex, so the worst child point is a corner
        for (auto g : group) {
          for (const auto& c : child.triangles[g]) {
            const double d = geom::pointTriangleDistance(c, tri[0], tri[1], tri[2]);
            eps = std::max(eps, d + child.epsilon[g]);
          }
        }
        eps *= 1.0 + 1e-12;
      }
      const auto id = static_cast<std::uint32_t>(parent.triangles.size());
      parent.triangles.push_back(tri);
      parent.epsilon.push_back(eps);
      parent.children.push_back(group);
      for (auto g : group) child.parent[g] = id;
    }
    parent.centroid.resize(parent.size());
    parent.radius.resize(parent.size());
    for (std::size_t k = 0; k < parent.size(); ++k) finishNode(parent, k);
    tree.levels_.push_back(std::move(parent));
  }
  return tree;
}

std::vector<std::size_t> SurrogateTree::levelSizes() const {
  std::vector<std::size_t> sizes;
  for (const auto& l : levels_) sizes.push_back(l.size());
  return sizes;
}

}  // namespace ltsdem
