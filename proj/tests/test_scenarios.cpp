#include "ltsdem/errors.hpp"
#include "ltsdem/scenarios.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ltsdem;

namespace {

std::size_t staticTriangles(const World& w) {
  std::size_t n = 0;
  for (const auto& s : w.statics()) n += s.shape->mesh.size();
  return n;
}

/// Pairs of bodies whose halos already touch in the initial state.
std::size_t initialOverlaps(const World& w) {
  const CollisionGraph g = buildCollisionGraph(w.particles(), w.statics(), w.config().policy);
  auto motionOf = [&](BodyRef ref) {
    BodyMotion m;
    m.ref = ref;
    if (ref.isStatic) {
      m.shape = w.statics()[ref.index].shape.get();
    } else {
      m.shape = w.particles()[ref.index].shape.get();
      m.state = w.particles()[ref.index].timeline.current;
    }
    return m;
  };
  std::size_t n = 0;
  for (const auto& [a, b] : g.edges) {
    if (!proximityContacts(motionOf(BodyRef::particle(a)), motionOf(BodyRef::particle(b)), 0.0).empty()) ++n;
  }
  for (std::uint32_t p = 0; p < g.staticLinks.size(); ++p) {
    for (auto s : g.staticLinks[p]) {
      if (!proximityContacts(motionOf(BodyRef::particle(p)), motionOf(BodyRef::fixed(s)), 0.0).empty()) ++n;
    }
  }
  return n;
}

bool sameStart(const World& a, const World& b) {
  if (a.particles().size() != b.particles().size()) return false;
  for (std::size_t i = 0; i < a.particles().size(); ++i) {
    const auto& x = a.particles()[i].timeline.current;
    const auto& y = b.particles()[i].timeline.current;
    if (x.position != y.position || x.velocity != y.velocity || x.angularVelocity != y.angularVelocity ||
        x.rotation.coeffs() != y.rotation.coeffs())
      return false;
    if (a.particles()[i].shape->mesh.vertices != b.particles()[i].shape->mesh.vertices) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("particle pairs") {
  const World w = buildParticlePairs(5, 2);
  CHECK(w.particles().size() == 10);
  CHECK(w.statics().empty());
  for (std::size_t k = 0; k < 5; ++k) {
    const auto& l = w.particles()[2 * k].timeline.current;
    const auto& r = w.particles()[2 * k + 1].timeline.current;
    CHECK(l.position.y() == r.position.y());
    CHECK(l.velocity.x() >= 0.5);
    CHECK(l.velocity.x() <= 1.5);
    CHECK(r.velocity.x() <= -0.5);
    CHECK(r.velocity.x() >= -1.5);
    CHECK(w.particles()[2 * k].shape->mesh.size() == 48);
  }
  CHECK(initialOverlaps(w) == 0);
  CHECK(sameStart(w, buildParticlePairs(5, 2)));
  CHECK_FALSE(sameStart(w, buildParticlePairs(5, 3)));
  CHECK_THROWS_AS(buildParticlePairs(0, 1), InvalidArgument);
}

TEST_CASE("stacks") {
  const World w = buildStacks(2, 4);
  CHECK(w.particles().size() == 160);
  CHECK(w.statics().size() == 1);
  CHECK(initialOverlaps(w) == 0);
  // the first stack of every row stands upright and still
  for (int row = 0; row < 2; ++row) {
    for (int k = 0; k < 20; ++k) {
      const auto& s = w.particles()[static_cast<std::size_t>(row * 80 + k)].timeline.current;
      CHECK(s.velocity.isZero());
      CHECK(s.position.x() == doctest::Approx(0.0));
    }
  }
  CHECK(sameStart(w, buildStacks(2, 4)));
}

TEST_CASE("tower") {
  const World w = buildTower(3, 1);
  CHECK(w.particles().size() == 3 * 32 + 1);
  CHECK(w.statics().size() == 1);
  CHECK(initialOverlaps(w) == 0);
  const auto& ball = w.particles().back();
  CHECK(ball.shape->mesh.size() == 80);
  CHECK(ball.shape->mass.mass > 10.0 * w.particles()[0].shape->mass.mass);
  CHECK(ball.timeline.current.velocity.x() == 10.0);
}

TEST_CASE("hopper") {
  const World w = buildHopper(30, 6);
  CHECK(w.particles().size() == 30);
  CHECK(w.statics().size() == 2);
  CHECK(staticTriangles(w) == 1856 + 2);
  for (const auto& p : w.particles()) {
    const auto tris = p.shape->mesh.size();
    CHECK(tris % 40 == 0);
    CHECK(tris >= 80);
    CHECK(tris <= 320);
    double rmax = 0.0, rmin = kInf;
    for (const auto& v : p.shape->mesh.vertices) {
      rmax = std::max(rmax, v.norm());
      rmin = std::min(rmin, v.norm());
    }
    // vertices are stored about the center of mass, so allow the offset
    CHECK(rmax <= 1.3 * 1.0 * 2.0);
    CHECK(p.shape->sphereRadius >= 0.025);
    CHECK(p.shape->sphereRadius <= 1.3 + 0.1);
  }
  CHECK(initialOverlaps(w) == 0);
  CHECK(sameStart(w, buildHopper(30, 6)));
  CHECK_THROWS_AS(buildHopper(3, 1, {}, 1e-2, "/nonexistent/hopper.obj"), IoError);
}

TEST_CASE("staircase") {
  const World w = buildStaircase(20, 8);
  CHECK(w.particles().size() == 20);
  CHECK(w.statics().size() == 20);
  CHECK(staticTriangles(w) == 40);
  CHECK(initialOverlaps(w) == 0);
  for (const auto& p : w.particles()) CHECK(p.timeline.current.velocity.y() < -1.8);
}

TEST_CASE("funnel mesh") {
  const TriangleMesh m = makeFunnel(12.0, 4.0, 10.0, 29, 32);
  CHECK(m.size() == 1856);
  // inward normals: from the surface towards the axis
  for (std::size_t t = 0; t < m.size(); ++t) {
    const auto c = m.corners(t);
    const Vec3 centroid = (c[0] + c[1] + c[2]) / 3.0;
    const Vec3 radial(centroid.x(), 0.0, centroid.z());
    CHECK(m.faceNormal(t).dot(radial) < 0.0);
  }
  CHECK_THROWS_AS(makeFunnel(1, 1, 1, 0, 8), InvalidArgument);
}

TEST_CASE("config parsing") {
  SUBCASE("values and comments") {
    std::istringstream in(
        "# pairs\nscenario = pairs\nseed = 42\ndt_max = 0.25 # trailing\nmode = global\n"
        "deterministic = true\nfriction = 0.1\n\n");
    const ScenarioConfig c = parseConfig(in);
    CHECK(c.scenario == "pairs");
    CHECK(c.seed == 42);
    CHECK(c.dtMax == 0.25);
    CHECK(c.mode == Mode::Global);
    CHECK(c.deterministic);
    CHECK(c.solver.friction == 0.1);
    CHECK(engineConfig(c).policy.dtMax == 0.25);
    CHECK(engineConfig(c).solver.friction == 0.1);
  }
  SUBCASE("unknown key names the key and line") {
    std::istringstream in("scenario = pairs\n\nbogus_key = 1\n");
    try {
      parseConfig(in);
      FAIL("expected a config error");
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("line 3") != std::string::npos);
      CHECK(msg.find("bogus_key") != std::string::npos);
    }
  }
  SUBCASE("malformed values") {
    for (const char* text : {"seed = -1\n", "dt_max = fast\n", "mode = sideways\n", "deterministic = maybe\n",
                             "scale\n", "scenario = marbles\n", "alpha = 1\n", "restitution = 2\n"}) {
      std::istringstream in(text);
      CHECK_THROWS_AS(parseConfig(in), ConfigError);
    }
  }
  SUBCASE("format round trip") {
    ScenarioConfig c;
    c.scenario = "hopper";
    c.seed = 77;
    c.dtMax = 0.125;
    c.widen = 3e-3;
    c.solver.threshold = 1e-6;
    c.hopperMesh = "data/hopper.obj";
    std::istringstream in(formatConfig(c));
    const ScenarioConfig back = parseConfig(in);
    CHECK(formatConfig(back) == formatConfig(c));
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(loadConfig("/nonexistent/x.cfg"), IoError); }
}

TEST_CASE("frame dump") {
  World w;
  auto cube = BodyShape::dynamic(makeCube(Vec3::Zero(), 1.0), 1.0, 0.01);
  ParticleState s;
  s.position = Vec3(3, 0, 0);
  w.addParticle(cube, s);
  s.position = Vec3(-3, 0, 0);
  s.rotation = Quat(Eigen::AngleAxisd(0.3, Vec3::UnitZ()));
  w.addParticle(cube, s);
  const auto path = std::filesystem::temp_directory_path() / "ltsdem_frame_test.obj";
  dumpFrame(w, path);
  std::ifstream in(path);
  std::string line;
  int v = 0, f = 0, g = 0;
  while (std::getline(in, line)) {
    if (line.starts_with("v ")) ++v;
    if (line.starts_with("f ")) ++f;
    if (line.starts_with("g body_")) ++g;
  }
  CHECK(v == 16);
  CHECK(f == 24);
  CHECK(g == 2);
  const TriangleMesh back = loadMesh(path);
  CHECK(back.size() == 24);
  CHECK(back.vertices[0].x() > 2.0);
  CHECK(back.vertices[8].x() < -2.0);
  std::filesystem::remove(path);
}
