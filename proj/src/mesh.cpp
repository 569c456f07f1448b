#include "ltsdem/mesh.hpp"

#include "ltsdem/errors.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace ltsdem {

Vec3 TriangleMesh::faceNormal(std::size_t t) const {
  const auto [a, b, c] = corners(t);
  const Vec3 n = (b - a).cross(c - a);
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

double TriangleMesh::area(std::size_t t) const {
  const auto [a, b, c] = corners(t);
  return 0.5 * (b - a).cross(c - a).norm();
}

Aabb TriangleMesh::bounds() const {
  Aabb box;
  for (const auto& v : vertices) box.expand(v);
  return box;
}

bool TriangleMesh::isWatertight() const {
  if (triangles.empty()) return false;
  // directed edge -> count; a closed, consistently oriented surface has every
  // directed edge exactly once and its reverse exactly once.
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> directed;
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      ++directed[{t[k], t[(k + 1) % 3]}];
    }
  }
  for (const auto& [edge, count] : directed) {
    if (count != 1) return false;
    const auto it = directed.find({edge.second, edge.first});
    if (it == directed.end() || it->second != 1) return false;
  }
  return true;
}

void TriangleMesh::validate() const {
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (auto idx : triangles[t]) {
      if (idx >= vertices.size()) {
        throw InvalidArgument("triangle " + std::to_string(t) + " references vertex " +
                              std::to_string(idx) + " out of range");
      }
    }
    if (area(t) <= 1e-12) {
      throw InvalidArgument("triangle " + std::to_string(t) + " has zero area");
    }
  }
}

void TriangleMesh::translate(const Vec3& offset) {
  for (auto& v : vertices) v += offset;
}

TriangleMesh makeCube(const Vec3& center, double edge) {
  if (!(edge > 0.0)) throw InvalidArgument("cube edge must be positive");
  const double h = 0.5 * edge;
  TriangleMesh m;
  for (int i = 0; i < 8; ++i) {
    m.vertices.emplace_back(center + Vec3((i & 1) ? h : -h, (i & 2) ? h : -h, (i & 4) ? h : -h));
  }
  // two triangles per face, outward counter-clockwise
  m.triangles = {{0, 2, 1}, {1, 2, 3},  // -z
                 {4, 5, 6}, {5, 7, 6},  // +z
                 {0, 1, 4}, {1, 5, 4},  // -y
                 {2, 6, 3}, {3, 6, 7},  // +y
                 {0, 4, 2}, {2, 4, 6},  // -x
                 {1, 3, 5}, {3, 7, 5}}; // +x
  return m;
}

TriangleMesh makePlane(const Vec3& cornerA, const Vec3& cornerB) {
  const Vec3 span = cornerB - cornerA;
  int flat = -1;
  int spanning = 0;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(span[k]) <= 1e-12) {
      flat = k;
    } else {
      ++spanning;
    }
  }
  if (spanning != 2 || flat < 0) {
    throw InvalidArgument("plane corners must span a non-degenerate axis-aligned rectangle");
  }
  const int u = (flat + 1) % 3;
  const int v = (flat + 2) % 3;
  const Vec3 lo = cornerA.cwiseMin(cornerB);
  const Vec3 hi = cornerA.cwiseMax(cornerB);
  TriangleMesh m;
  auto corner = [&](bool hu, bool hv) {
    Vec3 p = lo;
    p[flat] = cornerA[flat];
    p[u] = hu ? hi[u] : lo[u];
    p[v] = hv ? hi[v] : lo[v];
    return p;
  };
  m.vertices = {corner(false, false), corner(true, false), corner(true, true), corner(false, true)};
  // (u, v, flat) is right-handed, so counter-clockwise in (u, v) faces +flat
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  return m;
}

namespace {

/// Seeded 3D gradient noise in roughly [-1, 1].
class GradientNoise {
 public:
  explicit GradientNoise(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::array<int, 256> p{};
    for (int i = 0; i < 256; ++i) p[i] = i;
    for (int i = 255; i > 0; --i) {
      std::uniform_int_distribution<int> pick(0, i);
      std::swap(p[i], p[pick(rng)]);
    }
    for (int i = 0; i < 512; ++i) perm_[i] = p[i & 255];
  }

  [[nodiscard]] double operator()(const Vec3& q) const {
    const int X = static_cast<int>(std::floor(q.x())) & 255;
    const int Y = static_cast<int>(std::floor(q.y())) & 255;
    const int Z = static_cast<int>(std::floor(q.z())) & 255;
    const double x = q.x() - std::floor(q.x());
    const double y = q.y() - std::floor(q.y());
    const double z = q.z() - std::floor(q.z());
    const double u = fade(x), v = fade(y), w = fade(z);
    const int A = perm_[X] + Y, AA = perm_[A] + Z, AB = perm_[A + 1] + Z;
    const int B = perm_[X + 1] + Y, BA = perm_[B] + Z, BB = perm_[B + 1] + Z;
    return lerp(w,
                lerp(v, lerp(u, grad(perm_[AA], x, y, z), grad(perm_[BA], x - 1, y, z)),
                     lerp(u, grad(perm_[AB], x, y - 1, z), grad(perm_[BB], x - 1, y - 1, z))),
                lerp(v, lerp(u, grad(perm_[AA + 1], x, y, z - 1), grad(perm_[BA + 1], x - 1, y, z - 1)),
                     lerp(u, grad(perm_[AB + 1], x, y - 1, z - 1),
                          grad(perm_[BB + 1], x - 1, y - 1, z - 1))));
  }

 private:
  static double fade(double t) { return t * t * t * (t * (t * 6 - 15) + 10); }
  static double lerp(double t, double a, double b) { return a + t * (b - a); }
  static double grad(int hash, double x, double y, double z) {
    const int h = hash & 15;
    const double u = h < 8 ? x : y;
    const double v = h < 4 ? y : (h == 12 || h == 14 ? x : z);
    return ((h & 1) ? -u : u) + ((h & 2) ? -v : v);
  }

  std::array<int, 512> perm_{};
};

TriangleMesh tetrahedron() {
  TriangleMesh m;
  const double s = 1.0 / std::sqrt(3.0);
  m.vertices = {Vec3(s, s, s), Vec3(s, -s, -s), Vec3(-s, s, -s), Vec3(-s, -s, s)};
  m.triangles = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return m;
}

/// Unit sphere with `rings` latitude rings (poles excluded) of `segments` vertices.
TriangleMesh latLongSphere(int rings, int segments) {
  TriangleMesh m;
  m.vertices.emplace_back(0.0, -1.0, 0.0);
  for (int k = 1; k <= rings; ++k) {
    const double lat = -std::numbers::pi / 2 + k * std::numbers::pi / (rings + 1);
    for (int s = 0; s < segments; ++s) {
      const double lon = 2.0 * std::numbers::pi * s / segments;
      m.vertices.emplace_back(std::cos(lat) * std::cos(lon), std::sin(lat), std::cos(lat) * std::sin(lon));
    }
  }
  m.vertices.emplace_back(0.0, 1.0, 0.0);
  const auto south = 0u;
  const auto north = static_cast<std::uint32_t>(m.vertices.size() - 1);
  auto ring = [&](int k, int s) {
    return static_cast<std::uint32_t>(1 + (k - 1) * segments + ((s % segments) + segments) % segments);
  };
  for (int s = 0; s < segments; ++s) {
    m.triangles.push_back({south, ring(1, s), ring(1, s + 1)});
  }
  for (int k = 1; k < rings; ++k) {
    for (int s = 0; s < segments; ++s) {
      m.triangles.push_back({ring(k, s), ring(k + 1, s), ring(k + 1, s + 1)});
      m.triangles.push_back({ring(k, s), ring(k + 1, s + 1), ring(k, s + 1)});
    }
  }
  for (int s = 0; s < segments; ++s) {
    m.triangles.push_back({north, ring(rings, s + 1), ring(rings, s)});
  }
  return m;
}

}  // namespace

TriangleMesh makeNoisySphere(double radius, int triangleCount, double etaR, std::uint64_t seed) {
  if (!(radius > 0.0)) throw InvalidArgument("sphere radius must be positive");
  if (!(etaR >= 1.0)) throw InvalidArgument("eta_r must be >= 1");
  if (triangleCount < 4 || triangleCount % 2 != 0) {
    throw InvalidArgument("closed sphere triangulation needs an even triangle count >= 4");
  }

  TriangleMesh m;
  if (triangleCount == 4) {
    m = tetrahedron();
  } else {
    // faces = 2 * segments * rings; pick the factorisation closest to a
    // regular layout (segments ~ 2 * latitude bands).
    const int half = triangleCount / 2;
    int bestRings = -1;
    int bestScore = 0;
    for (int rings = 1; rings <= half; ++rings) {
      if (half % rings != 0) continue;
      const int segments = half / rings;
      if (segments < 3) continue;
      const int score = std::abs(segments - 2 * (rings + 1));
      if (bestRings < 0 || score < bestScore) {
        bestRings = rings;
        bestScore = score;
      }
    }
    if (bestRings < 0) throw InvalidArgument("no sphere triangulation with that triangle count");
    m = latLongSphere(bestRings, half / bestRings);
  }

  GradientNoise noise(seed);
  // random lattice offset so different seeds sample different noise regions
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> shift(0.0, 64.0);
  const Vec3 offset(shift(rng), shift(rng), shift(rng));
  for (auto& v : m.vertices) {
    const Vec3 dir = v.normalized();
    double scale = 1.0;
    if (etaR > 1.0) {
      double sum = 0.0, amp = 1.0, freq = 1.5, norm = 0.0;
      for (int octave = 0; octave < 4; ++octave) {
        sum += amp * noise(dir * freq + offset);
        norm += amp;
        amp *= 0.5;
        freq *= 2.0;
      }
      const double unit = std::clamp(0.5 * (sum / norm) + 0.5, 0.0, 1.0);
      scale = 1.0 + (etaR - 1.0) * unit;
    }
    v = dir * (radius * scale);
  }
  return m;
}

TriangleMesh parseObj(std::istream& in) {
  TriangleMesh m;
  std::vector<std::pair<Triangle, std::size_t>> faces;  // with source line
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) throw FormatError("malformed vertex record", lineNo);
      m.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<long> idx;
      std::string tok;
      while (ls >> tok) {
        const auto slash = tok.find('/');
        const std::string head = tok.substr(0, slash);
        try {
          std::size_t used = 0;
          const long value = std::stol(head, &used);
          if (used != head.size()) throw std::invalid_argument(head);
          idx.push_back(value);
        } catch (const std::exception&) {
          throw FormatError("malformed face index '" + tok + "'", lineNo);
        }
      }
      if (idx.size() != 3) {
        throw FormatError("face '" + line + "' has " + std::to_string(idx.size()) +
                              " vertices; only triangles are supported",
                          lineNo);
      }
      Triangle t{};
      for (int k = 0; k < 3; ++k) {
        const long n = static_cast<long>(m.vertices.size());
        const long resolved = idx[k] > 0 ? idx[k] - 1 : n + idx[k];
        if (idx[k] == 0 || resolved < 0) {
          throw FormatError("face index " + std::to_string(idx[k]) + " out of range", lineNo);
        }
        t[k] = static_cast<std::uint32_t>(resolved);
      }
      faces.emplace_back(t, lineNo);
    }
    // other records (vn, vt, g, o, s, usemtl, mtllib) carry nothing we use
  }
  for (const auto& [t, at] : faces) {
    for (auto i : t) {
      if (i >= m.vertices.size()) {
        throw FormatError("face index " + std::to_string(i + 1) + " out of range", at);
      }
    }
    m.triangles.push_back(t);
  }
  return m;
}

TriangleMesh loadMesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file " + path.string());
  return parseObj(in);
}

void writeObj(std::ostream& out, const TriangleMesh& mesh) {
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

double signedVolume(const TriangleMesh& mesh) {
  double v = 0.0;
  for (std::size_t t = 0; t < mesh.size(); ++t) {
    const auto [a, b, c] = mesh.corners(t);
    v += a.dot(b.cross(c)) / 6.0;
  }
  return v;
}

MassProperties massProperties(const TriangleMesh& mesh, double density) {
  if (!(density > 0.0)) throw InvalidArgument("density must be positive");
  if (!mesh.isWatertight()) throw InvalidArgument("mass properties need a watertight mesh");

  // Covariance of the canonical tetrahedron (0, e1, e2, e3), unit determinant.
  Mat3 canonical;
  canonical << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  canonical /= 120.0;

  double volume = 0.0;
  Vec3 firstMoment = Vec3::Zero();
  Mat3 covariance = Mat3::Zero();
  for (std::size_t t = 0; t < mesh.size(); ++t) {
    const auto [a, b, c] = mesh.corners(t);
    Mat3 A;
    A.col(0) = a;
    A.col(1) = b;
    A.col(2) = c;
    const double det = A.determinant();
    volume += det / 6.0;
    firstMoment += det / 6.0 * (a + b + c) / 4.0;
    covariance += det * A * canonical * A.transpose();
  }
  if (!(volume > 0.0)) throw InvalidArgument("mesh encloses non-positive volume (inverted winding?)");

  MassProperties mp;
  mp.mass = density * volume;
  mp.inverseMass = 1.0 / mp.mass;
  mp.centerOfMass = firstMoment / volume;
  const Mat3 centered = density * (covariance - volume * mp.centerOfMass * mp.centerOfMass.transpose());
  mp.inertia = centered.trace() * Mat3::Identity() - centered;
  mp.inertia = 0.5 * (mp.inertia + mp.inertia.transpose());
  mp.inverseInertia = mp.inertia.inverse();
  return mp;
}

BoundingSphere boundingSphere(const TriangleMesh& mesh, double epsilon) {
  if (mesh.vertices.empty()) throw InvalidArgument("bounding sphere of an empty mesh");
  const auto& pts = mesh.vertices;
  auto farthest = [&](const Vec3& from) {
    std::size_t best = 0;
    double bestD = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double d = (pts[i] - from).squaredNorm();
      if (d > bestD) {
        bestD = d;
        best = i;
      }
    }
    return best;
  };
  const std::size_t y = farthest(pts[0]);
  const std::size_t z = farthest(pts[y]);
  Vec3 center = 0.5 * (pts[y] + pts[z]);
  double radius = 0.5 * (pts[y] - pts[z]).norm();
  for (const auto& p : pts) {
    const double d = (p - center).norm();
    if (d > radius) {
      const double grown = 0.5 * (radius + d);
      center += (d - grown) / d * (p - center);
      radius = grown;
    }
  }
  // absorb round-off from the incremental growth
  for (const auto& p : pts) radius = std::max(radius, (p - center).norm());
  return {center, radius + epsilon};
}

BoundingSphere boundingSphereAbout(const TriangleMesh& mesh, const Vec3& center, double epsilon) {
  double r = 0.0;
  for (const auto& p : mesh.vertices) r = std::max(r, (p - center).norm());
  return {center, r + epsilon};
}

}  // namespace ltsdem
