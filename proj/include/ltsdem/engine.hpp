#pragma once

#include "ltsdem/broadphase.hpp"
#include "ltsdem/ccd.hpp"
#include "ltsdem/clustering.hpp"
#include "ltsdem/contacts.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <set>
#include <vector>

namespace ltsdem {

enum class Mode { Local, Global };

struct EngineConfig {
  TimeStepPolicy policy;
  SolverConfig solver;
  CcdOptions ccd;
  Mode mode = Mode::Local;
  int threads = 1;
  bool deterministic = false;
  std::size_t sweepCap = 10'000'000;

  void validate() const;
  /// Wall-clock columns are only meaningful when the run is not meant to be
  /// reproducible byte for byte.
  [[nodiscard]] bool reproducible() const { return deterministic || threads == 1; }
};

struct ClusterUpdate {
  std::size_t clusterId = 0;
  std::size_t size = 0;
  std::uint32_t firstMember = 0;
  double tCurrent = 0.0;
  double clusterDt = 0.0;
  double dtEffective = 0.0;  // step actually taken when active
  bool collision = false;    // narrowing found a proper collision
  bool active = false;
  int narrowingIters = 0;
  std::size_t nContacts = 0;  // resting contacts handed to the solver
  int picardIters = 0;
  bool converged = true;
  double solveUs = 0.0;
};

struct SweepTrace {
  std::size_t sweep = 0;
  double globalTMin = 0.0;  // at the start of the sweep
  std::size_t nClusters = 0;
  std::size_t nActive = 0;
  double tCollision = 0.0;
  std::size_t rollbacks = 0;
  double phaseBroadUs = 0.0;
  double phaseClusterUs = 0.0;
  double phaseDtUs = 0.0;
  double phaseSolveUs = 0.0;
  std::vector<ClusterUpdate> clusters;
  std::vector<std::uint32_t> advanced;  // particles of active clusters, sorted
};

class World {
 public:
  explicit World(EngineConfig config = {});

  std::uint32_t addParticle(std::shared_ptr<const BodyShape> shape, const ParticleState& initial);
  std::uint32_t addStatic(std::shared_ptr<const BodyShape> shape);

  [[nodiscard]] const std::vector<Particle>& particles() const { return particles_; }
  [[nodiscard]] std::vector<Particle>& particles() { return particles_; }
  [[nodiscard]] const std::vector<StaticBody>& statics() const { return statics_; }
  [[nodiscard]] const EngineConfig& config() const { return config_; }
  void setConfig(const EngineConfig& config);

  [[nodiscard]] std::size_t sweepCount() const { return sweep_; }
  /// Smallest t_current over all particles; infinity for an empty world.
  [[nodiscard]] double globalMinTime() const;
  /// Dynamic particles that have shared a resting contact with particle i.
  [[nodiscard]] const std::set<std::uint32_t>& contactPartners(std::uint32_t i) const { return partners_[i]; }

 private:
  friend SweepTrace step(World& world);

  TaskPool& pool();

  EngineConfig config_;
  std::vector<Particle> particles_;
  std::vector<StaticBody> statics_;
  std::vector<std::set<std::uint32_t>> partners_;
  std::size_t sweep_ = 0;
  std::unique_ptr<TaskPool> pool_;
};

struct Masking {
  double tCollision = kInf;
  std::vector<char> active;
};

/// t_collision is the earliest t_current + dt over all clusters; clusters
/// whose t_current lies beyond it sit this sweep out.
Masking maskClusters(const std::vector<double>& tCurrent, const std::vector<double>& dtEffective);

/// One sweep: broad phase, clustering with consolidation, per-cluster
/// contact solve and effective step, masking, commit of active clusters.
SweepTrace step(World& world);

using SweepObserver = std::function<void(const World&, const SweepTrace&)>;

/// Steps until every particle has reached tFinal. Throws SweepLimitExceeded
/// after config().sweepCap sweeps. Traces are kept only when requested.
std::vector<SweepTrace> run(World& world, double tFinal, const SweepObserver& observer = {},
                            bool keepTraces = true);

/// Streams sweep.csv and cluster_updates.csv into a directory.
class TraceWriter {
 public:
  TraceWriter(const std::filesystem::path& dir, bool zeroTimings);
  void write(const SweepTrace& trace);
  void flush();

 private:
  std::ofstream sweeps_;
  std::ofstream clusters_;
  bool zeroTimings_;
};

void emitTrace(const std::vector<SweepTrace>& traces, const std::filesystem::path& dir, bool zeroTimings);

}  // namespace ltsdem
