#pragma once

#include "ltsdem/math.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ltsdem {

using Triangle = std::array<std::uint32_t, 3>;

/// Indexed triangle soup. Counter-clockwise winding seen from outside.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;

  [[nodiscard]] std::size_t size() const { return triangles.size(); }
  [[nodiscard]] std::array<Vec3, 3> corners(std::size_t t) const {
    const auto& tri = triangles[t];
    return {vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]};
  }
  [[nodiscard]] Vec3 faceNormal(std::size_t t) const;
  [[nodiscard]] double area(std::size_t t) const;
  [[nodiscard]] Aabb bounds() const;

  /// Every edge shared by exactly two triangles with opposite orientation.
  [[nodiscard]] bool isWatertight() const;
  /// Throws InvalidArgument on out-of-range indices or zero-area triangles.
  void validate() const;

  void translate(const Vec3& offset);
};

struct MassProperties {
  double mass = 0.0;
  double inverseMass = 0.0;
  Vec3 centerOfMass = Vec3::Zero();
  Mat3 inertia = Mat3::Zero();  // about the center of mass, body frame
  Mat3 inverseInertia = Mat3::Zero();

  [[nodiscard]] bool isStatic() const { return inverseMass == 0.0; }
  static MassProperties staticBody() { return {}; }
};

struct BoundingSphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

TriangleMesh makeCube(const Vec3& center, double edge);

/// Axis-aligned rectangle spanned by two opposite corners; the rectangle must
/// be flat along exactly one axis. Normals face +axis of the flat dimension.
TriangleMesh makePlane(const Vec3& cornerA, const Vec3& cornerB);

/// Latitude/longitude sphere with `triangleCount` faces whose vertices are
/// pushed outward by hierarchical gradient noise to radii in
/// [radius, radius * etaR]. Centered at the origin.
TriangleMesh makeNoisySphere(double radius, int triangleCount, double etaR, std::uint64_t seed);

/// Reads `v x y z` / `f i j k` records. Face tokens may carry `/vt/vn`
/// suffixes; only the position index is used.
TriangleMesh loadMesh(const std::filesystem::path& path);
TriangleMesh parseObj(std::istream& in);
void writeObj(std::ostream& out, const TriangleMesh& mesh);

/// Uniform-density rigid body properties by signed tetrahedra.
/// Throws InvalidArgument for non-watertight meshes or density <= 0.
MassProperties massProperties(const TriangleMesh& mesh, double density);
double signedVolume(const TriangleMesh& mesh);

/// Ritter-style sphere around all vertices, radius inflated by epsilon.
BoundingSphere boundingSphere(const TriangleMesh& mesh, double epsilon);
BoundingSphere boundingSphereAbout(const TriangleMesh& mesh, const Vec3& center, double epsilon);

}  // namespace ltsdem
