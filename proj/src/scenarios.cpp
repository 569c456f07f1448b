#include "ltsdem/scenarios.hpp"

#include "ltsdem/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#ifndef LTSDEM_DATA_DIR
#define LTSDEM_DATA_DIR "data"
#endif

namespace ltsdem {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parseNumber(const std::string& key, const std::string& value, std::size_t line) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("line " + std::to_string(line) + ": bad value '" + value + "' for key '" + key + "'");
  }
  return out;
}

bool parseBool(const std::string& key, const std::string& value, std::size_t line) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("line " + std::to_string(line) + ": bad boolean '" + value + "' for key '" + key + "'");
}

ParticleState at(const Vec3& position, const Vec3& velocity = Vec3::Zero()) {
  ParticleState s;
  s.position = position;
  s.velocity = velocity;
  return s;
}

void addFloor(World& w, double y, double half, double eps) {
  w.addStatic(BodyShape::fixed(makePlane(Vec3(-half, y, -half), Vec3(half, y, half)), eps));
}

/// Rocks with radius in [0.025, 1] and 80..320 triangles, placed on a
/// lattice so that no two initial halos touch.
void addRocks(World& w, int n, std::mt19937_64& rng, double eps, const Vec3& origin, int perRow,
              const Vec3& velocity) {
  std::uniform_real_distribution<double> radius(0.025, 1.0);
  std::uniform_real_distribution<double> eta(1.0, 1.3);
  std::uniform_int_distribution<int> size(2, 8);
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  const double pitch = 2.0 * 1.3 + 4.0 * eps;
  for (int i = 0; i < n; ++i) {
    const double r = radius(rng);
    const int tris = 40 * size(rng);
    const double e = eta(rng);
    const auto meshSeed = rng();
    Vec3 com;
    auto shape = BodyShape::dynamic(makeNoisySphere(r, tris, e, meshSeed), 1.0, eps, &com);
    const int layer = i / (perRow * perRow);
    const int cell = i % (perRow * perRow);
    const Vec3 slot = origin + Vec3((cell % perRow) * pitch, layer * pitch, (cell / perRow) * pitch);
    const Vec3 v = velocity + Vec3(jitter(rng), jitter(rng), jitter(rng));
    w.addParticle(shape, at(slot + com, v));
  }
}

}  // namespace

void ScenarioConfig::validate() const {
  static const std::vector<std::string> names{"pairs", "stacks", "tower", "hopper", "staircase"};
  if (std::find(names.begin(), names.end(), scenario) == names.end()) {
    throw ConfigError("unknown scenario '" + scenario + "'");
  }
  if (scale < 1) throw ConfigError("scale must be >= 1");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(dtMax > 0.0)) throw ConfigError("dt_max must be positive");
  if (!(alpha > 1.0)) throw ConfigError("alpha must exceed 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (!(widen > 0.0)) throw ConfigError("widen must be positive");
  if (sweepCap < 1) throw ConfigError("sweep_cap must be >= 1");
  try {
    solver.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

ScenarioConfig parseConfig(std::istream& in) {
  ScenarioConfig c;
  using Setter = std::function<void(const std::string&, const std::string&, std::size_t)>;
  const std::map<std::string, Setter> setters{
      {"scenario", [&](auto&, auto& v, auto) { c.scenario = v; }},
      {"seed", [&](auto& k, auto& v, auto l) { c.seed = parseNumber<std::uint64_t>(k, v, l); }},
      {"dt_max", [&](auto& k, auto& v, auto l) { c.dtMax = parseNumber<double>(k, v, l); }},
      {"alpha", [&](auto& k, auto& v, auto l) { c.alpha = parseNumber<double>(k, v, l); }},
      {"epsilon", [&](auto& k, auto& v, auto l) { c.epsilon = parseNumber<double>(k, v, l); }},
      {"t_final", [&](auto& k, auto& v, auto l) { c.tFinal = parseNumber<double>(k, v, l); }},
      {"mode",
       [&](auto& k, auto& v, auto l) {
         if (v == "local") {
           c.mode = Mode::Local;
         } else if (v == "global") {
           c.mode = Mode::Global;
         } else {
           throw ConfigError("line " + std::to_string(l) + ": bad value '" + v + "' for key '" + k + "'");
         }
       }},
      {"scale", [&](auto& k, auto& v, auto l) { c.scale = parseNumber<int>(k, v, l); }},
      {"threads", [&](auto& k, auto& v, auto l) { c.threads = parseNumber<int>(k, v, l); }},
      {"deterministic", [&](auto& k, auto& v, auto l) { c.deterministic = parseBool(k, v, l); }},
      {"sweep_cap", [&](auto& k, auto& v, auto l) { c.sweepCap = parseNumber<std::size_t>(k, v, l); }},
      {"widen", [&](auto& k, auto& v, auto l) { c.widen = parseNumber<double>(k, v, l); }},
      {"rotational_inflation", [&](auto& k, auto& v, auto l) { c.rotationalInflation = parseBool(k, v, l); }},
      {"restitution", [&](auto& k, auto& v, auto l) { c.solver.restitution = parseNumber<double>(k, v, l); }},
      {"friction", [&](auto& k, auto& v, auto l) { c.solver.friction = parseNumber<double>(k, v, l); }},
      {"relaxation", [&](auto& k, auto& v, auto l) { c.solver.relaxation = parseNumber<double>(k, v, l); }},
      {"penalty", [&](auto& k, auto& v, auto l) { c.solver.penalty = parseNumber<double>(k, v, l); }},
      {"threshold", [&](auto& k, auto& v, auto l) { c.solver.threshold = parseNumber<double>(k, v, l); }},
      {"max_iterations", [&](auto& k, auto& v, auto l) { c.solver.maxIterations = parseNumber<int>(k, v, l); }},
      {"separation", [&](auto& k, auto& v, auto l) { c.solver.separation = parseNumber<double>(k, v, l); }},
      {"hopper_mesh", [&](auto&, auto& v, auto) { c.hopperMesh = v; }},
  };

  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineNo) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw ConfigError("line " + std::to_string(lineNo) + ": unknown key '" + key + "'");
    }
    it->second(key, value, lineNo);
  }
  c.validate();
  return c;
}

ScenarioConfig loadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return parseConfig(in);
}

std::string formatConfig(const ScenarioConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "scenario = " << c.scenario << '\n'
      << "seed = " << c.seed << '\n'
      << "dt_max = " << c.dtMax << '\n'
      << "alpha = " << c.alpha << '\n'
      << "epsilon = " << c.epsilon << '\n'
      << "t_final = " << c.tFinal << '\n'
      << "mode = " << (c.mode == Mode::Local ? "local" : "global") << '\n'
      << "scale = " << c.scale << '\n'
      << "threads = " << c.threads << '\n'
      << "deterministic = " << (c.deterministic ? "true" : "false") << '\n'
      << "sweep_cap = " << c.sweepCap << '\n'
      << "widen = " << c.widen << '\n'
      << "rotational_inflation = " << (c.rotationalInflation ? "true" : "false") << '\n'
      << "restitution = " << c.solver.restitution << '\n'
      << "friction = " << c.solver.friction << '\n'
      << "relaxation = " << c.solver.relaxation << '\n'
      << "penalty = " << c.solver.penalty << '\n'
      << "threshold = " << c.solver.threshold << '\n'
      << "max_iterations = " << c.solver.maxIterations << '\n'
      << "separation = " << c.solver.separation << '\n';
  if (!c.hopperMesh.empty()) out << "hopper_mesh = " << c.hopperMesh << '\n';
  return out.str();
}

EngineConfig engineConfig(const ScenarioConfig& c) {
  EngineConfig e;
  e.policy.dtMax = c.dtMax;
  e.policy.alpha = c.alpha;
  e.solver = c.solver;
  e.ccd.widen = c.widen;
  e.ccd.rotationalInflation = c.rotationalInflation;
  e.mode = c.mode;
  e.threads = c.threads;
  e.deterministic = c.deterministic;
  e.sweepCap = c.sweepCap;
  return e;
}

World buildParticlePairs(int nPairs, std::uint64_t seed, const EngineConfig& engine, double epsilon) {
  if (nPairs < 1) throw InvalidArgument("need at least one pair");
  World w(engine);
  constexpr double r = 0.5;
  auto shape = BodyShape::dynamic(makeNoisySphere(r, 48, 1.0, seed), 1.0, epsilon);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> speed(0.5, 1.5);
  const double spacing = 3.0 * r;
  for (int k = 0; k < nPairs; ++k) {
    const double y = k * spacing;
    const double vl = speed(rng);
    const double vr = speed(rng);
    w.addParticle(shape, at({-2.0, y, 0.0}, {vl, 0.0, 0.0}));
    w.addParticle(shape, at({2.0, y, 0.0}, {-vr, 0.0, 0.0}));
  }
  return w;
}

World buildStacks(int rows, std::uint64_t seed, const EngineConfig& engine, double epsilon) {
  if (rows < 1) throw InvalidArgument("need at least one row");
  World w(engine);
  constexpr int kStacks = 4;
  constexpr int kHeight = 20;
  constexpr double kTip = 0.2;
  const double gap = 2.5 * epsilon;
  auto cube = BodyShape::dynamic(makeCube(Vec3::Zero(), 1.0), 1.0, epsilon);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> slant(0.0, 8.0 * kDeg);
  for (int row = 0; row < rows; ++row) {
    for (int s = 0; s < kStacks; ++s) {
      const double theta = s == 0 ? 0.0 : slant(rng);
      const Vec3 base(4.0 * s, 0.0, 4.0 * row);
      const double omega = -kTip * std::sin(theta);
      for (int k = 0; k < kHeight; ++k) {
        const double y = gap + 0.5 + k * (1.0 + gap);
        const Vec3 rel(k * (1.0 + gap) * std::tan(theta), y, 0.0);
        ParticleState st = at(base + rel);
        st.angularVelocity = Vec3(0.0, 0.0, omega);
        st.velocity = st.angularVelocity.cross(rel);
        w.addParticle(cube, st);
      }
    }
  }
  addFloor(w, 0.0, 4.0 * kStacks + 4.0 * rows + 20.0, epsilon);
  return w;
}

World buildTower(int layers, std::uint64_t seed, const EngineConfig& engine, double epsilon) {
  if (layers < 1) throw InvalidArgument("need at least one layer");
  World w(engine);
  constexpr int kRing = 32;
  constexpr double kRadius = 5.8;
  const double gap = 2.5 * epsilon;
  auto cube = BodyShape::dynamic(makeCube(Vec3::Zero(), 1.0), 1.0, epsilon);
  for (int layer = 0; layer < layers; ++layer) {
    const double offset = (layer % 2) * std::numbers::pi / kRing;
    const double y = gap + 0.5 + layer * (1.0 + gap);
    for (int k = 0; k < kRing; ++k) {
      const double phi = offset + 2.0 * std::numbers::pi * k / kRing;
      ParticleState st = at({kRadius * std::cos(phi), y, kRadius * std::sin(phi)});
      st.rotation = Quat(Eigen::AngleAxisd(-phi, Vec3::UnitY()));
      w.addParticle(cube, st);
    }
  }
  Vec3 com;
  auto ball = BodyShape::dynamic(makeNoisySphere(1.0, 80, 1.2, seed), 10.0, epsilon, &com);
  const double lift = gap + 1.2 + 2.0 * epsilon;
  w.addParticle(ball, at(Vec3(-kRadius - 8.0, lift, 0.0) + com, {10.0, 0.0, 0.0}));
  addFloor(w, 0.0, kRadius + 40.0, epsilon);
  return w;
}

std::filesystem::path defaultHopperMesh() { return std::filesystem::path(LTSDEM_DATA_DIR) / "hopper.obj"; }

TriangleMesh makeFunnel(double topRadius, double bottomRadius, double height, int bands, int segments) {
  if (bands < 1 || segments < 3) throw InvalidArgument("funnel needs bands >= 1 and segments >= 3");
  TriangleMesh m;
  for (int b = 0; b <= bands; ++b) {
    const double f = static_cast<double>(b) / bands;
    const double rad = bottomRadius + f * (topRadius - bottomRadius);
    for (int s = 0; s < segments; ++s) {
      const double phi = 2.0 * std::numbers::pi * s / segments;
      m.vertices.emplace_back(rad * std::cos(phi), f * height, rad * std::sin(phi));
    }
  }
  auto id = [&](int b, int s) { return static_cast<std::uint32_t>(b * segments + (s % segments)); };
  for (int b = 0; b < bands; ++b) {
    for (int s = 0; s < segments; ++s) {
      // wound so the normals face the funnel axis
      m.triangles.push_back({id(b, s), id(b + 1, s + 1), id(b + 1, s)});
      m.triangles.push_back({id(b, s), id(b, s + 1), id(b + 1, s + 1)});
    }
  }
  return m;
}

World buildHopper(int nParticles, std::uint64_t seed, const EngineConfig& engine, double epsilon,
                  const std::filesystem::path& mesh) {
  if (nParticles < 1) throw InvalidArgument("need at least one particle");
  World w(engine);
  w.addStatic(BodyShape::fixed(loadMesh(mesh.empty() ? defaultHopperMesh() : mesh), epsilon));
  addFloor(w, -12.0, 40.0, epsilon);
  std::mt19937_64 rng(seed);
  const int perRow = 5;
  const double pitch = 2.0 * 1.3 + 4.0 * epsilon;
  const double half = 0.5 * (perRow - 1) * pitch;
  addRocks(w, nParticles, rng, epsilon, Vec3(-half, 12.0, -half), perRow, Vec3(0.0, -2.0, 0.0));
  return w;
}

World buildStaircase(int nParticles, std::uint64_t seed, const EngineConfig& engine, double epsilon) {
  if (nParticles < 1) throw InvalidArgument("need at least one particle");
  World w(engine);
  constexpr int kSteps = 20;
  constexpr double kRun = 1.5;
  constexpr double kRise = 0.75;
  constexpr double kWidth = 12.0;
  for (int i = 0; i < kSteps; ++i) {
    const double y = -i * kRise;
    w.addStatic(BodyShape::fixed(makePlane(Vec3(i * kRun, y, -0.5 * kWidth), Vec3((i + 1) * kRun, y, 0.5 * kWidth)),
                                 epsilon));
  }
  std::mt19937_64 rng(seed);
  const int perRow = 4;
  const double pitch = 2.0 * 1.3 + 4.0 * epsilon;
  addRocks(w, nParticles, rng, epsilon, Vec3(0.5, 3.0, -0.5 * (perRow - 1) * pitch), perRow,
           Vec3(0.5, -2.0, 0.0));
  return w;
}

World buildScenario(const ScenarioConfig& c) {
  c.validate();
  const EngineConfig e = engineConfig(c);
  if (c.scenario == "pairs") return buildParticlePairs(c.scale, c.seed, e, c.epsilon);
  if (c.scenario == "stacks") return buildStacks(c.scale, c.seed, e, c.epsilon);
  if (c.scenario == "tower") return buildTower(c.scale, c.seed, e, c.epsilon);
  if (c.scenario == "hopper") return buildHopper(c.scale, c.seed, e, c.epsilon, c.hopperMesh);
  return buildStaircase(c.scale, c.seed, e, c.epsilon);
}

void dumpFrame(const World& world, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write frame " + path.string());
  out.precision(10);
  std::size_t base = 1;
  std::size_t id = 0;
  auto emit = [&](const TriangleMesh& mesh, const Pose& pose) {
    out << "g body_" << id++ << '\n';
    for (const auto& v : mesh.vertices) {
      const Vec3 p = pose.apply(v);
      out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    }
    for (const auto& t : mesh.triangles) {
      out << "f " << base + t[0] << ' ' << base + t[1] << ' ' << base + t[2] << '\n';
    }
    base += mesh.vertices.size();
  };
  for (const auto& p : world.particles()) emit(p.shape->mesh, p.timeline.current.pose());
  for (const auto& s : world.statics()) emit(s.shape->mesh, Pose{});
  if (!out) throw IoError("frame write failed: " + path.string());
}

}  // namespace ltsdem
