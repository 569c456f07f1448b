#include "ltsdem/state.hpp"

#include "ltsdem/errors.hpp"

#include <sstream>

namespace ltsdem {

ParticleState interpolate(const ParticleState& a, const ParticleState& b, double t) {
  if (t < a.time || t > b.time) {
    std::ostringstream msg;
    msg << "interpolation time " << t << " outside [" << a.time << ", " << b.time << "]";
    throw OutOfRange(msg.str());
  }
  if (t == a.time) return a;
  if (t == b.time) return b;
  const double s = (t - a.time) / (b.time - a.time);
  ParticleState r;
  r.position = (1.0 - s) * a.position + s * b.position;
  r.velocity = (1.0 - s) * a.velocity + s * b.velocity;
  r.angularVelocity = (1.0 - s) * a.angularVelocity + s * b.angularVelocity;
  r.rotation = slerpShortest(a.rotation, b.rotation, s);
  r.time = t;
  return r;
}

ParticleState extrapolateFreeFlight(const ParticleState& s, double dt) {
  if (dt < 0.0) throw InvalidArgument("free flight needs dt >= 0");
  if (dt == 0.0) return s;
  ParticleState r = s;
  r.position = s.position + dt * s.velocity;
  r.rotation = (expMap(s.angularVelocity, dt) * s.rotation).normalized();
  r.time = s.time + dt;
  return r;
}

ParticleTimeline rollback(const ParticleTimeline& timeline, double t) {
  if (t < timeline.old.time) {
    std::ostringstream msg;
    msg << "rollback to " << t << " below the oldest valid snapshot " << timeline.old.time;
    throw RollbackBelowValidSnapshot(msg.str());
  }
  if (t > timeline.current.time) {
    throw OutOfRange("rollback target lies after the current snapshot");
  }
  ParticleTimeline r = timeline;
  r.current = interpolate(timeline.old, timeline.current, t);
  r.next.reset();
  return r;
}

ParticleTimeline rollOver(const ParticleTimeline& timeline) {
  if (!timeline.next) throw InvalidState("roll-over without a new snapshot");
  ParticleTimeline r;
  r.old = timeline.current;
  r.current = *timeline.next;
  return r;
}

}  // namespace ltsdem
