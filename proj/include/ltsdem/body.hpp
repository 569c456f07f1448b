#pragma once

#include "ltsdem/mesh.hpp"
#include "ltsdem/state.hpp"
#include "ltsdem/surrogate.hpp"

#include <compare>
#include <memory>

namespace ltsdem {

/// Immutable shape data shared by all particles with the same mesh.
/// Dynamic shapes are stored in body coordinates with the center of mass at
/// the origin; static shapes are stored in world coordinates.
struct BodyShape {
  TriangleMesh mesh;
  SurrogateTree tree;
  MassProperties mass;
  double epsilon = 0.0;
  Vec3 sphereCenter = Vec3::Zero();  // body frame
  double sphereRadius = 0.0;         // includes epsilon
  Aabb box;                          // body frame, includes epsilon

  /// Recenters `mesh` on its center of mass. The returned offset is the
  /// original center of mass, i.e. where the body sits in world space.
  static std::shared_ptr<const BodyShape> dynamic(TriangleMesh mesh, double density, double epsilon,
                                                  Vec3* centerOfMass = nullptr);
  static std::shared_ptr<const BodyShape> fixed(TriangleMesh mesh, double epsilon);
};

struct Particle {
  std::shared_ptr<const BodyShape> shape;
  ParticleTimeline timeline;
};

struct StaticBody {
  std::shared_ptr<const BodyShape> shape;
};

/// Reference to either a dynamic particle or a static body.
struct BodyRef {
  std::uint32_t index = 0;
  bool isStatic = false;

  static BodyRef particle(std::uint32_t i) { return {i, false}; }
  static BodyRef fixed(std::uint32_t i) { return {i, true}; }
  auto operator<=>(const BodyRef&) const = default;
};

}  // namespace ltsdem
