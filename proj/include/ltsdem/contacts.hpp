#pragma once

#include "ltsdem/ccd.hpp"

#include <vector>

namespace ltsdem {

struct SolverConfig {
  double threshold = 1e-4;
  int maxIterations = 256;
  double relaxation = 0.5;
  double penalty = 1.0;
  double restitution = 1.0;
  double friction = 0.3;
  double separation = 0.2;

  void validate() const;
};

/// Velocity-level view of one body during the solve. Static bodies carry
/// zero inverse mass and inertia.
struct SolverBody {
  BodyRef ref;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 angularVelocity = Vec3::Zero();
  double inverseMass = 0.0;
  Mat3 inverseInertia = Mat3::Zero();  // world frame

  static SolverBody fromState(BodyRef ref, const ParticleState& s, const MassProperties& m);
  static SolverBody fixed(BodyRef ref);
};

struct ImpulseSolution {
  std::vector<double> normal;             // per contact, >= 0
  std::vector<Vec3> friction;             // per contact, tangential
  std::vector<Vec3> deltaVelocity;        // per body
  std::vector<Vec3> deltaAngularVelocity; // per body
  int iterations = 0;
  bool converged = true;
};

/// Greedy coloring: contacts in one class share no dynamic body. Classes
/// hold contact indices in ascending order.
std::vector<std::vector<std::size_t>> colorContactGraph(const std::vector<ContactPoint>& contacts);

/// Picard iteration over accumulated contact impulses. Updates body
/// velocities in place.
ImpulseSolution solveImpulses(const std::vector<ContactPoint>& contacts, std::vector<SolverBody>& bodies,
                              const SolverConfig& config);

/// Pushes overlapping bodies apart by a fraction of the penetration depth,
/// split by inverse mass. Returns per-body position shifts; velocities are
/// not touched.
std::vector<Vec3> applySeparation(const std::vector<ContactPoint>& contacts, std::vector<SolverBody>& bodies,
                                  const SolverConfig& config);

/// Free-flight advance of every member with its post-impulse velocities.
void integrateCluster(std::vector<ParticleTimeline*>& members, double dt);

}  // namespace ltsdem
