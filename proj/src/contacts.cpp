#include "ltsdem/contacts.hpp"

#include "ltsdem/errors.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace ltsdem {

void SolverConfig::validate() const {
  if (!(threshold > 0.0)) throw InvalidArgument("solver threshold must be positive");
  if (maxIterations < 1) throw InvalidArgument("solver needs at least one iteration");
  if (!(relaxation > 0.0 && relaxation <= 1.0)) throw InvalidArgument("relaxation must lie in (0,1]");
  if (!(penalty > 0.0)) throw InvalidArgument("penalty must be positive");
  if (!(restitution >= 0.0 && restitution <= 1.0)) throw InvalidArgument("restitution must lie in [0,1]");
  if (!(friction >= 0.0)) throw InvalidArgument("friction must be non-negative");
  if (!(separation > 0.0 && separation < 1.0)) throw InvalidArgument("separation must lie in (0,1)");
}

SolverBody SolverBody::fromState(BodyRef ref, const ParticleState& s, const MassProperties& m) {
  SolverBody b;
  b.ref = ref;
  b.position = s.position;
  b.velocity = s.velocity;
  b.angularVelocity = s.angularVelocity;
  b.inverseMass = m.inverseMass;
  const Mat3 r = s.rotation.toRotationMatrix();
  b.inverseInertia = r * m.inverseInertia * r.transpose();
  return b;
}

SolverBody SolverBody::fixed(BodyRef ref) {
  SolverBody b;
  b.ref = ref;
  return b;
}

std::vector<std::vector<std::size_t>> colorContactGraph(const std::vector<ContactPoint>& contacts) {
  std::vector<std::vector<std::size_t>> classes;
  std::vector<std::set<std::uint32_t>> used;
  for (std::size_t c = 0; c < contacts.size(); ++c) {
    const ContactPoint& cp = contacts[c];
    std::size_t k = 0;
    for (; k < classes.size(); ++k) {
      const bool clashA = !cp.bodyA.isStatic && used[k].contains(cp.bodyA.index);
      const bool clashB = !cp.bodyB.isStatic && used[k].contains(cp.bodyB.index);
      if (!clashA && !clashB) break;
    }
    if (k == classes.size()) {
      classes.emplace_back();
      used.emplace_back();
    }
    classes[k].push_back(c);
    if (!cp.bodyA.isStatic) used[k].insert(cp.bodyA.index);
    if (!cp.bodyB.isStatic) used[k].insert(cp.bodyB.index);
  }
  return classes;
}

namespace {

std::map<BodyRef, std::size_t> indexBodies(const std::vector<SolverBody>& bodies) {
  std::map<BodyRef, std::size_t> index;
  for (std::size_t i = 0; i < bodies.size(); ++i) index[bodies[i].ref] = i;
  return index;
}

std::size_t lookup(const std::map<BodyRef, std::size_t>& index, BodyRef ref) {
  const auto it = index.find(ref);
  if (it == index.end()) throw InvalidState("contact refers to a body without mass properties");
  return it->second;
}

Vec3 pointVelocity(const SolverBody& b, const Vec3& r) { return b.velocity + b.angularVelocity.cross(r); }

/// Inverse effective mass of the pair along direction d.
double inverseEffectiveMass(const SolverBody& a, const Vec3& ra, const SolverBody& b, const Vec3& rb,
                            const Vec3& d) {
  const Vec3 ja = ra.cross(d);
  const Vec3 jb = rb.cross(d);
  return a.inverseMass + b.inverseMass + ja.dot(a.inverseInertia * ja) + jb.dot(b.inverseInertia * jb);
}

struct Row {
  std::size_t a = 0;
  std::size_t b = 0;
  Vec3 ra = Vec3::Zero();
  Vec3 rb = Vec3::Zero();
  Vec3 n = Vec3::UnitX();
  double kn = 0.0;
  double target = 0.0;
};

}  // namespace

ImpulseSolution solveImpulses(const std::vector<ContactPoint>& contacts, std::vector<SolverBody>& bodies,
                              const SolverConfig& config) {
  const auto index = indexBodies(bodies);
  ImpulseSolution sol;
  sol.normal.assign(contacts.size(), 0.0);
  sol.friction.assign(contacts.size(), Vec3::Zero());
  sol.deltaVelocity.assign(bodies.size(), Vec3::Zero());
  sol.deltaAngularVelocity.assign(bodies.size(), Vec3::Zero());
  if (contacts.empty()) return sol;

  std::vector<Vec3> v0(bodies.size()), w0(bodies.size());
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    v0[i] = bodies[i].velocity;
    w0[i] = bodies[i].angularVelocity;
  }

  std::vector<Row> rows(contacts.size());
  for (std::size_t c = 0; c < contacts.size(); ++c) {
    Row& row = rows[c];
    row.a = lookup(index, contacts[c].bodyA);
    row.b = lookup(index, contacts[c].bodyB);
    const SolverBody& A = bodies[row.a];
    const SolverBody& B = bodies[row.b];
    row.ra = contacts[c].position - A.position;
    row.rb = contacts[c].position - B.position;
    row.n = contacts[c].normal;
    row.kn = inverseEffectiveMass(A, row.ra, B, row.rb, row.n);
    const double vn = (pointVelocity(A, row.ra) - pointVelocity(B, row.rb)).dot(row.n);
    row.target = vn < 0.0 ? -config.restitution * vn : 0.0;
  }

  auto apply = [&](const Row& row, const Vec3& p) {
    SolverBody& A = bodies[row.a];
    SolverBody& B = bodies[row.b];
    A.velocity += A.inverseMass * p;
    A.angularVelocity += A.inverseInertia * row.ra.cross(p);
    B.velocity -= B.inverseMass * p;
    B.angularVelocity -= B.inverseInertia * row.rb.cross(p);
  };

  const auto classes = colorContactGraph(contacts);
  const double omega = config.relaxation;
  sol.converged = false;
  for (int it = 0; it < config.maxIterations; ++it) {
    double change = 0.0;
    for (const auto& cls : classes) {
      for (const std::size_t c : cls) {
        const Row& row = rows[c];
        if (row.kn <= 0.0) continue;
        const SolverBody& A = bodies[row.a];
        const SolverBody& B = bodies[row.b];
        Vec3 vrel = pointVelocity(A, row.ra) - pointVelocity(B, row.rb);
        const double vn = vrel.dot(row.n);

        double& lambda = sol.normal[c];
        const double trial = std::max(0.0, lambda + config.penalty * (row.target - vn) / row.kn);
        const double next = (1.0 - omega) * lambda + omega * trial;
        const double dl = next - lambda;
        lambda = next;
        apply(row, dl * row.n);

        Vec3& f = sol.friction[c];
        const double cone = config.friction * lambda;
        Vec3 fNext = f;
        vrel = pointVelocity(A, row.ra) - pointVelocity(B, row.rb);
        const Vec3 vt = vrel - vrel.dot(row.n) * row.n;
        const double speed = vt.norm();
        if (speed > 1e-14 && cone > 0.0) {
          const Vec3 t = vt / speed;
          const double kt = inverseEffectiveMass(A, row.ra, B, row.rb, t);
          Vec3 fTrial = f - (speed / kt) * t;
          if (fTrial.norm() > cone) fTrial *= cone / fTrial.norm();
          fNext = (1.0 - omega) * f + omega * fTrial;
        }
        if (fNext.norm() > cone) fNext = cone > 0.0 ? Vec3(fNext * (cone / fNext.norm())) : Vec3::Zero();
        const Vec3 df = fNext - f;
        f = fNext;
        apply(row, df);

        const Vec3 dp = dl * row.n + df;
        change = std::max({change, dp.norm(), row.ra.cross(dp).norm(), row.rb.cross(dp).norm()});
      }
    }
    sol.iterations = it + 1;
    if (change < config.threshold) {
      sol.converged = true;
      break;
    }
  }
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    sol.deltaVelocity[i] = bodies[i].velocity - v0[i];
    sol.deltaAngularVelocity[i] = bodies[i].angularVelocity - w0[i];
  }
  return sol;
}

std::vector<Vec3> applySeparation(const std::vector<ContactPoint>& contacts, std::vector<SolverBody>& bodies,
                                  const SolverConfig& config) {
  const auto index = indexBodies(bodies);
  struct Push {
    double depth = 0.0;
    Vec3 normal = Vec3::Zero();
  };
  std::map<std::pair<BodyRef, BodyRef>, Push> pushes;
  for (const auto& c : contacts) {
    Push& p = pushes[{c.bodyA, c.bodyB}];
    p.depth = std::max(p.depth, c.depth);
    p.normal += c.normal;
  }
  std::vector<Vec3> shift(bodies.size(), Vec3::Zero());
  for (const auto& [key, p] : pushes) {
    if (p.depth <= 0.0 || p.normal.norm() <= 1e-12) continue;
    const std::size_t a = lookup(index, key.first);
    const std::size_t b = lookup(index, key.second);
    const double total = bodies[a].inverseMass + bodies[b].inverseMass;
    if (total <= 0.0) continue;
    const Vec3 n = p.normal.normalized();
    const double amount = config.separation * p.depth;
    shift[a] += amount * (bodies[a].inverseMass / total) * n;
    shift[b] -= amount * (bodies[b].inverseMass / total) * n;
  }
  for (std::size_t i = 0; i < bodies.size(); ++i) bodies[i].position += shift[i];
  return shift;
}

void integrateCluster(std::vector<ParticleTimeline*>& members, double dt) {
  for (ParticleTimeline* tl : members) tl->next = extrapolateFreeFlight(tl->current, dt);
}

}  // namespace ltsdem
