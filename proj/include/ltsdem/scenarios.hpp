#pragma once

#include "ltsdem/engine.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace ltsdem {

struct ScenarioConfig {
  std::string scenario = "pairs";  // pairs | stacks | tower | hopper | staircase
  std::uint64_t seed = 1;
  double dtMax = 1.0;
  double alpha = 2.0;
  double epsilon = 1e-2;
  double tFinal = 5.0;
  Mode mode = Mode::Local;
  int scale = 1;  // pairs, rows, layers or particle count
  int threads = 1;
  bool deterministic = false;
  std::size_t sweepCap = 10'000'000;
  double widen = 1e-3;
  bool rotationalInflation = false;
  SolverConfig solver;
  std::string hopperMesh;  // empty: bundled model

  void validate() const;
};

/// Flat `key = value` text. Unknown keys and malformed values raise
/// ConfigError naming the key and line.
ScenarioConfig parseConfig(std::istream& in);
ScenarioConfig loadConfig(const std::filesystem::path& path);
std::string formatConfig(const ScenarioConfig& config);

EngineConfig engineConfig(const ScenarioConfig& config);

/// Two columns of 48-triangle spheres moving towards each other; row k of
/// the left column meets row k of the right one exactly once.
World buildParticlePairs(int nPairs, std::uint64_t seed, const EngineConfig& engine = {}, double epsilon = 1e-2);

/// rows x 4 stacks of 20 unit cubes on a floor. All but the left-most stack
/// of a row lean and start tipping.
World buildStacks(int rows, std::uint64_t seed, const EngineConfig& engine = {}, double epsilon = 1e-2);

/// Brick-laid rings of 32 cubes and a heavy projectile aimed at the base.
World buildTower(int layers, std::uint64_t seed, const EngineConfig& engine = {}, double epsilon = 1e-2);

/// Noisy rocks dropped into a funnel. Throws IoError if the mesh is missing.
World buildHopper(int nParticles, std::uint64_t seed, const EngineConfig& engine = {}, double epsilon = 1e-2,
                  const std::filesystem::path& mesh = {});

/// Noisy rocks dropped onto 20 descending steps.
World buildStaircase(int nParticles, std::uint64_t seed, const EngineConfig& engine = {}, double epsilon = 1e-2);

World buildScenario(const ScenarioConfig& config);

std::filesystem::path defaultHopperMesh();

/// Funnel surface: `bands` rings of `segments` quads, two triangles each.
TriangleMesh makeFunnel(double topRadius, double bottomRadius, double height, int bands, int segments);

/// All bodies at their current poses, one `g body_<id>` group per body;
/// particles first, then statics.
void dumpFrame(const World& world, const std::filesystem::path& path);

}  // namespace ltsdem
