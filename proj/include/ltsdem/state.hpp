#pragma once

#include "ltsdem/math.hpp"

#include <optional>

namespace ltsdem {

/// Kinematic snapshot of one rigid particle at one time stamp. `position`
/// is the center of mass; `rotation` maps body to world coordinates.
struct ParticleState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Quat rotation = Quat::Identity();
  Vec3 angularVelocity = Vec3::Zero();
  double time = 0.0;

  [[nodiscard]] Pose pose() const { return {rotation, position}; }
};

/// The three snapshots t_old <= t_current <= t_new of one particle.
struct ParticleTimeline {
  ParticleState old;
  ParticleState current;
  std::optional<ParticleState> next;

  static ParticleTimeline at(const ParticleState& s) { return {s, s, std::nullopt}; }

  [[nodiscard]] double lastDt() const { return current.time - old.time; }
};

/// Linear in position/velocity/angular velocity, shortest-arc slerp in
/// rotation. Throws OutOfRange if t lies outside [a.time, b.time].
ParticleState interpolate(const ParticleState& a, const ParticleState& b, double t);

/// Free flight: constant velocity and constant world-frame angular velocity.
ParticleState extrapolateFreeFlight(const ParticleState& s, double dt);

/// Replace `current` by its interpolant at t in [t_old, t_current]; clears `next`.
ParticleTimeline rollback(const ParticleTimeline& timeline, double t);

/// old <- current, current <- next. Throws InvalidState without a next snapshot.
ParticleTimeline rollOver(const ParticleTimeline& timeline);

}  // namespace ltsdem
