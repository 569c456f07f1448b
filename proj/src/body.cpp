#include "ltsdem/body.hpp"

#include "ltsdem/errors.hpp"

namespace ltsdem {

std::shared_ptr<const BodyShape> BodyShape::dynamic(TriangleMesh mesh, double density, double epsilon,
                                                    Vec3* centerOfMass) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  mesh.validate();
  auto shape = std::make_shared<BodyShape>();
  const MassProperties mp = massProperties(mesh, density);
  if (centerOfMass) *centerOfMass = mp.centerOfMass;
  mesh.translate(-mp.centerOfMass);
  shape->mass = mp;
  shape->mass.centerOfMass = Vec3::Zero();
  shape->epsilon = epsilon;
  // the center of mass is the only body point that moves linearly under free
  // flight, so the broad phase sphere is centered there
  const BoundingSphere s = boundingSphereAbout(mesh, Vec3::Zero(), epsilon);
  shape->sphereCenter = s.center;
  shape->sphereRadius = s.radius;
  shape->box = mesh.bounds();
  shape->box.inflate(epsilon);
  shape->tree = SurrogateTree::build(mesh, epsilon);
  shape->mesh = std::move(mesh);
  return shape;
}

std::shared_ptr<const BodyShape> BodyShape::fixed(TriangleMesh mesh, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  mesh.validate();
  auto shape = std::make_shared<BodyShape>();
  shape->mass = MassProperties::staticBody();
  shape->epsilon = epsilon;
  const BoundingSphere s = boundingSphere(mesh, epsilon);
  shape->sphereCenter = s.center;
  shape->sphereRadius = s.radius;
  shape->box = mesh.bounds();
  shape->box.inflate(epsilon);
  shape->tree = SurrogateTree::build(mesh, epsilon);
  shape->mesh = std::move(mesh);
  return shape;
}

}  // namespace ltsdem
