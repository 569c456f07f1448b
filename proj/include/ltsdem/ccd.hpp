#pragma once

#include "ltsdem/body.hpp"

#include <optional>
#include <vector>

namespace ltsdem {

struct ContactPoint {
  Vec3 position = Vec3::Zero();
  double time = 0.0;
  Vec3 normal = Vec3::UnitX();  // from body B towards body A
  double depth = 0.0;           // halo overlap, (eps_a + eps_b) - distance
  std::uint32_t triangleA = 0;
  std::uint32_t triangleB = 0;
  BodyRef bodyA;
  BodyRef bodyB;
};

/// A body together with the free-flight motion it follows inside a window.
/// Static bodies sit at the identity pose.
struct BodyMotion {
  const BodyShape* shape = nullptr;
  BodyRef ref;
  ParticleState state;

  [[nodiscard]] bool isStatic() const { return ref.isStatic; }
  [[nodiscard]] Pose poseAt(double t) const;
};

struct CcdOptions {
  double widen = 1e-3;            // relative widening of the found step
  int maxNarrowing = 32;          // narrowing iteration cap
  double narrowingTol = 1e-9;     // relative to the cluster step
  int edgeSamples = 9;            // edge-edge samples including both ends
  double timeTol = 1e-9;          // refinement tolerance in window units
  bool rotationalInflation = false;
};

struct CcdStats {
  std::size_t nodeTests = 0;
  std::size_t fineTests = 0;
};

/// Earliest s in [0,1] at which p0 + s*(p1-p0) lies within r of triangle
/// abc, or nullopt.
std::optional<double> vertexTriangleContactTime(const Vec3& p0, const Vec3& p1, const std::array<Vec3, 3>& tri,
                                                double r);

/// Earliest s in [0,1] at which the moving edge (a0(s), a1(s)), with each
/// endpoint linear in s, comes within r of the fixed edge b0 b1.
std::optional<double> edgeEdgeContactTime(const Vec3& a00, const Vec3& a01, const Vec3& a10, const Vec3& a11,
                                          const Vec3& b0, const Vec3& b1, double r, const CcdOptions& opt = {});

/// Earliest contact time of two fine triangles over [t0, t1] under the
/// piecewise-linear relative motion used by the search. Returns s in [0,1].
std::optional<double> trianglePairContactTime(const BodyMotion& a, std::uint32_t ta, const BodyMotion& b,
                                              std::uint32_t tb, double t0, double t1, const CcdOptions& opt = {});

struct PairHit {
  double time = kInf;
  std::vector<ContactPoint> contacts;
};

/// Multiscale earliest contact of a body pair inside [t0, bound]. Contacts
/// are evaluated at the returned time.
std::optional<PairHit> pairEarliestContact(const BodyMotion& a, const BodyMotion& b, double t0, double bound,
                                           const CcdOptions& opt = {}, CcdStats* stats = nullptr);

/// Reference search testing every fine triangle pair.
std::optional<double> pairEarliestContactExhaustive(const BodyMotion& a, const BodyMotion& b, double t0,
                                                    double bound, const CcdOptions& opt = {});

/// All fine triangle pairs whose halos overlap at time t, one contact each.
std::vector<ContactPoint> proximityContacts(const BodyMotion& a, const BodyMotion& b, double t,
                                            double slack = 0.0, CcdStats* stats = nullptr);

/// Fuses contacts of the same body pair lying within `radius` of each other
/// (single linkage). The result does not depend on input order.
std::vector<ContactPoint> filterContacts(const std::vector<ContactPoint>& raw, double radius);

struct EffectiveDt {
  double dt = 0.0;
  bool collision = false;
  int narrowingIters = 0;
  std::vector<ContactPoint> contacts;  // filtered, at the collision time
};

/// Narrowed and widened step of one cluster. `pairs` index into `bodies`;
/// pairs already in contact at t0 must have been removed by the caller.
EffectiveDt computeEffectiveDt(const std::vector<BodyMotion>& bodies,
                               const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs, double t0,
                               double clusterDt, const CcdOptions& opt = {}, CcdStats* stats = nullptr);

}  // namespace ltsdem
