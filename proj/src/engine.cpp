#include "ltsdem/engine.hpp"

#include "ltsdem/errors.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

namespace ltsdem {

void EngineConfig::validate() const {
  policy.validate();
  solver.validate();
  if (threads < 1) throw InvalidArgument("threads must be >= 1");
  if (sweepCap < 1) throw InvalidArgument("sweep cap must be >= 1");
  if (!(ccd.widen > 0.0)) throw InvalidArgument("widening must be positive");
}

World::World(EngineConfig config) : config_(config) { config_.validate(); }

void World::setConfig(const EngineConfig& config) {
  config.validate();
  if (config.threads != config_.threads) pool_.reset();
  config_ = config;
}

std::uint32_t World::addParticle(std::shared_ptr<const BodyShape> shape, const ParticleState& initial) {
  if (!shape || shape->mass.isStatic()) throw InvalidArgument("particles need a dynamic shape");
  ParticleState s = initial;
  s.rotation.normalize();
  particles_.push_back({std::move(shape), ParticleTimeline::at(s)});
  partners_.emplace_back();
  return static_cast<std::uint32_t>(particles_.size() - 1);
}

std::uint32_t World::addStatic(std::shared_ptr<const BodyShape> shape) {
  if (!shape) throw InvalidArgument("null static shape");
  statics_.push_back({std::move(shape)});
  return static_cast<std::uint32_t>(statics_.size() - 1);
}

double World::globalMinTime() const {
  double t = kInf;
  for (const auto& p : particles_) t = std::min(t, p.timeline.current.time);
  return t;
}

TaskPool& World::pool() {
  if (!pool_) pool_ = std::make_unique<TaskPool>(config_.threads);
  return *pool_;
}

namespace {

using Clock = std::chrono::steady_clock;

double microsSince(Clock::time_point start) {
  return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
}

/// Everything one cluster computes before the masking decision.
struct ClusterWork {
  std::vector<BodyMotion> bodies;  // members first, then statics
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  std::vector<ContactPoint> resting;
  EffectiveDt step;
  ImpulseSolution solution;
  double solveUs = 0.0;
};

void processCluster(const World& world, const Cluster& cluster,
                    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges, ClusterWork& work) {
  const auto& cfg = world.config();
  const auto& particles = world.particles();
  const auto& statics = world.statics();
  const std::size_t nm = cluster.members.size();
  const double t0 = cluster.tCurrent;

  auto localOf = [&](std::uint32_t particle) {
    return static_cast<std::uint32_t>(
        std::lower_bound(cluster.members.begin(), cluster.members.end(), particle) - cluster.members.begin());
  };
  for (auto m : cluster.members) {
    work.bodies.push_back({particles[m].shape.get(), BodyRef::particle(m), particles[m].timeline.current});
  }
  for (auto s : cluster.statics) {
    ParticleState fixedState;
    fixedState.time = t0;
    work.bodies.push_back({statics[s].shape.get(), BodyRef::fixed(s), fixedState});
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> candidates;
  for (const auto& [a, b] : edges) candidates.emplace_back(localOf(a), localOf(b));
  const auto& graphLinks = cluster.statics;
  for (std::uint32_t i = 0; i < nm; ++i) {
    for (std::uint32_t k = 0; k < graphLinks.size(); ++k) {
      candidates.emplace_back(i, static_cast<std::uint32_t>(nm + k));
    }
  }

  // resting contacts at t_current: these pairs do not constrain the step
  const auto solveStart = Clock::now();
  std::vector<ContactPoint> raw;
  double fuse = kInf;
  for (const auto& [i, j] : candidates) {
    const BodyMotion& A = work.bodies[i];
    const BodyMotion& B = work.bodies[j];
    const double r = A.shape->epsilon + B.shape->epsilon;
    fuse = std::min(fuse, 0.5 * r);
    auto cs = proximityContacts(A, B, t0, 1e-6 * r);
    if (cs.empty()) {
      work.pairs.emplace_back(i, j);
    } else {
      raw.insert(raw.end(), cs.begin(), cs.end());
    }
  }
  work.resting = filterContacts(raw, fuse);

  if (!work.resting.empty()) {
    std::vector<SolverBody> sb;
    for (const auto& b : work.bodies) {
      if (b.isStatic()) {
        sb.push_back(SolverBody::fixed(b.ref));
      } else {
        sb.push_back(SolverBody::fromState(b.ref, b.state, b.shape->mass));
      }
    }
    work.solution = solveImpulses(work.resting, sb, cfg.solver);
    applySeparation(work.resting, sb, cfg.solver);
    for (std::size_t i = 0; i < nm; ++i) {
      work.bodies[i].state.velocity = sb[i].velocity;
      work.bodies[i].state.angularVelocity = sb[i].angularVelocity;
      work.bodies[i].state.position = sb[i].position;
    }
  }
  work.solveUs = microsSince(solveStart);

  work.step = computeEffectiveDt(work.bodies, work.pairs, t0, cluster.dt, cfg.ccd);
}

}  // namespace

Masking maskClusters(const std::vector<double>& tCurrent, const std::vector<double>& dtEffective) {
  Masking m;
  for (std::size_t c = 0; c < tCurrent.size(); ++c) m.tCollision = std::min(m.tCollision, tCurrent[c] + dtEffective[c]);
  m.active.resize(tCurrent.size());
  for (std::size_t c = 0; c < tCurrent.size(); ++c) m.active[c] = tCurrent[c] <= m.tCollision;
  return m;
}

SweepTrace step(World& world) {
  const EngineConfig& cfg = world.config();
  TaskPool& pool = world.pool();
  auto& particles = world.particles_;

  SweepTrace trace;
  trace.sweep = world.sweep_;
  trace.globalTMin = world.globalMinTime();

  auto start = Clock::now();
  const CollisionGraph graph = buildCollisionGraph(particles, world.statics_, cfg.policy, &pool);
  trace.phaseBroadUs = microsSince(start);

  start = Clock::now();
  std::vector<Cluster> clusters = connectedComponents(graph);
  std::vector<std::size_t> clusterOf(particles.size());
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (auto m : clusters[c].members) clusterOf[m] = c;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> edgesOf(clusters.size());
  for (const auto& e : graph.edges) edgesOf[clusterOf[e.first]].push_back(e);
  std::vector<std::size_t> rolled(clusters.size(), 0);
  pool.parallelFor(clusters.size(), [&](std::size_t c) {
    rolled[c] = consolidate(clusters[c], particles, cfg.policy);
    attachStatics(clusters[c], graph);
  });
  for (auto r : rolled) trace.rollbacks += r;
  trace.phaseClusterUs = microsSince(start);

  start = Clock::now();
  std::vector<ClusterWork> work(clusters.size());
  pool.parallelFor(clusters.size(),
                   [&](std::size_t c) { processCluster(world, clusters[c], edgesOf[c], work[c]); });
  trace.phaseDtUs = microsSince(start);

  std::vector<double> starts(clusters.size()), steps(clusters.size());
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    starts[c] = clusters[c].tCurrent;
    steps[c] = work[c].step.dt;
  }
  const Masking mask = maskClusters(starts, steps);
  const double tCollision = mask.tCollision;
  const std::vector<char>& active = mask.active;
  trace.tCollision = tCollision;
  trace.nClusters = clusters.size();

  start = Clock::now();
  std::vector<double> taken(clusters.size(), 0.0);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    taken[c] = cfg.mode == Mode::Global ? tCollision - clusters[c].tCurrent : work[c].step.dt;
  }
  pool.parallelFor(clusters.size(), [&](std::size_t c) {
    if (!active[c]) return;
    const Cluster& cl = clusters[c];
    std::vector<ParticleTimeline*> members;
    for (std::size_t i = 0; i < cl.members.size(); ++i) {
      auto& tl = particles[cl.members[i]].timeline;
      tl.current = work[c].bodies[i].state;
      members.push_back(&tl);
    }
    integrateCluster(members, taken[c]);
    for (auto* tl : members) *tl = rollOver(*tl);
    for (const auto& cp : work[c].resting) {
      if (cp.bodyA.isStatic || cp.bodyB.isStatic) continue;
      world.partners_[cp.bodyA.index].insert(cp.bodyB.index);
      world.partners_[cp.bodyB.index].insert(cp.bodyA.index);
    }
  });
  trace.phaseSolveUs = microsSince(start);
  for (std::size_t c = 0; c < clusters.size(); ++c) trace.phaseSolveUs += work[c].solveUs;

  for (std::size_t c = 0; c < clusters.size(); ++c) {
    ClusterUpdate u;
    u.clusterId = c;
    u.size = clusters[c].members.size();
    u.firstMember = clusters[c].members.front();
    u.tCurrent = clusters[c].tCurrent;
    u.clusterDt = clusters[c].dt;
    u.dtEffective = taken[c];
    u.collision = work[c].step.collision;
    u.active = active[c];
    u.narrowingIters = work[c].step.narrowingIters;
    u.nContacts = work[c].resting.size();
    u.picardIters = work[c].solution.iterations;
    u.converged = work[c].solution.converged;
    u.solveUs = work[c].solveUs;
    trace.clusters.push_back(u);
    if (active[c]) {
      ++trace.nActive;
      trace.advanced.insert(trace.advanced.end(), clusters[c].members.begin(), clusters[c].members.end());
    }
  }
  std::sort(trace.advanced.begin(), trace.advanced.end());
  ++world.sweep_;
  return trace;
}

std::vector<SweepTrace> run(World& world, double tFinal, const SweepObserver& observer, bool keepTraces) {
  std::vector<SweepTrace> traces;
  std::size_t sweeps = 0;
  while (world.globalMinTime() < tFinal) {
    if (sweeps >= world.config().sweepCap) {
      std::ostringstream msg;
      msg << "sweep cap " << world.config().sweepCap << " reached at global time " << world.globalMinTime();
      throw SweepLimitExceeded(msg.str());
    }
    SweepTrace tr = step(world);
    ++sweeps;
    if (observer) observer(world, tr);
    if (keepTraces) traces.push_back(std::move(tr));
  }
  return traces;
}

TraceWriter::TraceWriter(const std::filesystem::path& dir, bool zeroTimings) : zeroTimings_(zeroTimings) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  sweeps_.open(dir / "sweep.csv", std::ios::binary);
  clusters_.open(dir / "cluster_updates.csv", std::ios::binary);
  if (!sweeps_ || !clusters_) throw IoError("cannot write trace files in " + dir.string());
  sweeps_ << "sweep,global_t_min,n_clusters,n_active,t_collision,rollbacks,phase_broad_us,phase_cluster_us,"
             "phase_dt_us,phase_solve_us\n";
  clusters_ << "sweep,cluster_id,size,t_current,dt_effective,narrowing_iters,n_contacts,picard_iters,solve_us\n";
  sweeps_.precision(17);
  clusters_.precision(17);
}

void TraceWriter::write(const SweepTrace& t) {
  auto us = [&](double v) { return zeroTimings_ ? 0.0 : v; };
  sweeps_ << t.sweep << ',' << t.globalTMin << ',' << t.nClusters << ',' << t.nActive << ',' << t.tCollision << ','
          << t.rollbacks << ',' << us(t.phaseBroadUs) << ',' << us(t.phaseClusterUs) << ',' << us(t.phaseDtUs)
          << ',' << us(t.phaseSolveUs) << '\n';
  for (const auto& c : t.clusters) {
    if (!c.active) continue;
    clusters_ << t.sweep << ',' << c.clusterId << ',' << c.size << ',' << c.tCurrent << ',' << c.dtEffective << ','
              << c.narrowingIters << ',' << c.nContacts << ',' << c.picardIters << ',' << us(c.solveUs) << '\n';
  }
  if (!sweeps_ || !clusters_) throw IoError("trace write failed");
}

void TraceWriter::flush() {
  sweeps_.flush();
  clusters_.flush();
  if (!sweeps_ || !clusters_) throw IoError("trace flush failed");
}

void emitTrace(const std::vector<SweepTrace>& traces, const std::filesystem::path& dir, bool zeroTimings) {
  TraceWriter w(dir, zeroTimings);
  for (const auto& t : traces) w.write(t);
  w.flush();
}

}  // namespace ltsdem
