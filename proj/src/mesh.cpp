#include "vemhyper/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

namespace vemhyper {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

void check_level(int level) {
  if (level < 1) throw InvalidInput("mesh refinement level must be >= 1");
  if (level > 10) throw InvalidInput("mesh refinement level must be <= 10");
}

// Deduplicates points within an absolute tolerance using a bucket grid.
class PointMerger {
 public:
  explicit PointMerger(double tol) : tol_(tol) {}

  int add(const Vec2& p) {
    const auto [ix, iy] = bucket(p);
    for (long dx = -1; dx <= 1; ++dx)
      for (long dy = -1; dy <= 1; ++dy) {
        auto it = buckets_.find(key(ix + dx, iy + dy));
        if (it == buckets_.end()) continue;
        for (int id : it->second)
          if ((points_[id] - p).norm() <= tol_) return id;
      }
    const int id = static_cast<int>(points_.size());
    points_.push_back(p);
    buckets_[key(ix, iy)].push_back(id);
    return id;
  }

  std::vector<Vec2> take() { return std::move(points_); }

 private:
  std::pair<long, long> bucket(const Vec2& p) const {
    return {static_cast<long>(std::floor(p.x() / (4 * tol_))),
            static_cast<long>(std::floor(p.y() / (4 * tol_)))};
  }
  static std::uint64_t key(long x, long y) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
           static_cast<std::uint32_t>(y);
  }

  double tol_;
  std::vector<Vec2> points_;
  std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
};

// Removes consecutive (cyclic) repeats left behind by point merging.
std::vector<int> compact_cycle(const std::vector<int>& cycle) {
  std::vector<int> out;
  for (int v : cycle)
    if (out.empty() || out.back() != v) out.push_back(v);
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  return out;
}

int side_tag(const Domain& domain, const Vec2& a, const Vec2& b) {
  const Vec2 sa = domain.inverse_map(a), sb = domain.inverse_map(b);
  constexpr double tol = 1e-9;
  if (std::abs(sa.y()) < tol && std::abs(sb.y()) < tol) return kBottom;
  if (std::abs(sa.x() - 1) < tol && std::abs(sb.x() - 1) < tol) return kRight;
  if (std::abs(sa.y() - 1) < tol && std::abs(sb.y() - 1) < tol) return kTop;
  if (std::abs(sa.x()) < tol && std::abs(sb.x()) < tol) return kLeft;
  return 0;
}

// Tags every unmatched directed element edge by the domain side it lies on.
void tag_boundary(PolygonalMesh& mesh) {
  std::set<std::pair<int, int>> directed;
  for (const auto& el : mesh.elements)
    for (std::size_t k = 0; k < el.size(); ++k) directed.emplace(el[k], el[(k + 1) % el.size()]);
  mesh.boundary_edges.clear();
  for (const auto& [i, j] : directed) {
    if (directed.count({j, i})) continue;
    const int tag = side_tag(mesh.domain, mesh.vertices[i], mesh.vertices[j]);
    if (tag == 0) throw InvalidInput("mesh generation produced an unmatched interior edge");
    mesh.boundary_edges[{i, j}] = tag;
  }
}

PolygonalMesh assemble_mesh(const Domain& domain, const std::vector<Polygon>& polys, double tol) {
  PointMerger merger(tol);
  PolygonalMesh mesh;
  mesh.domain = domain;
  for (const auto& poly : polys) {
    std::vector<int> cycle;
    cycle.reserve(poly.size());
    for (const auto& p : poly) cycle.push_back(merger.add(p));
    cycle = compact_cycle(cycle);
    if (cycle.size() < 3) continue;
    mesh.elements.push_back(std::move(cycle));
  }
  mesh.vertices = merger.take();
  tag_boundary(mesh);
  return mesh;
}

double domain_scale(const Domain& d) {
  double s = 0.0;
  for (const auto& c : d.corners()) s = std::max(s, c.norm());
  for (int i = 0; i < 4; ++i) s = std::max(s, (d.corners()[i] - d.corners()[(i + 1) % 4]).norm());
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Domain

Domain::Domain(Kind kind, const std::array<Vec2, 4>& corners) : kind_(kind), corners_(corners) {
  for (int i = 0; i < 4; ++i) {
    const Vec2& a = corners_[(i + 3) % 4];
    const Vec2& b = corners_[i];
    const Vec2& c = corners_[(i + 1) % 4];
    if (!(cross(b - a, c - b) > 0)) throw InvalidInput("domain corners must form a convex CCW quadrilateral");
  }
}

Domain Domain::unit_square() {
  return Domain(Kind::UnitSquare, {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)});
}

Domain Domain::rectangle(double width, double height) {
  if (!(width > 0 && height > 0)) throw InvalidInput("rectangle dimensions must be positive");
  return Domain(Kind::Rectangle, {Vec2(0, 0), Vec2(width, 0), Vec2(width, height), Vec2(0, height)});
}

Domain Domain::tapered(const std::array<Vec2, 4>& corners) { return Domain(Kind::TaperedQuad, corners); }

double Domain::area() const { return signed_area(corners_); }

Vec2 Domain::map(const Vec2& st) const {
  const double s = st.x(), t = st.y();
  return (1 - s) * (1 - t) * corners_[0] + s * (1 - t) * corners_[1] + s * t * corners_[2] +
         (1 - s) * t * corners_[3];
}

Mat2 Domain::map_jacobian(const Vec2& st) const {
  const double s = st.x(), t = st.y();
  Mat2 j;
  j.col(0) = (1 - t) * (corners_[1] - corners_[0]) + t * (corners_[2] - corners_[3]);
  j.col(1) = (1 - s) * (corners_[3] - corners_[0]) + s * (corners_[2] - corners_[1]);
  return j;
}

Vec2 Domain::inverse_map(const Vec2& x, double tol) const {
  Vec2 st(0.5, 0.5);
  const double scale = domain_scale(*this);
  for (int it = 0; it < 50; ++it) {
    const Vec2 r = map(st) - x;
    if (r.norm() <= tol * scale) break;
    st -= map_jacobian(st).partialPivLu().solve(r);
  }
  if ((map(st) - x).norm() > 1e3 * tol * scale) throw InvalidInput("inverse domain map did not converge");
  constexpr double slack = 1e-9;
  if (st.x() < -slack || st.x() > 1 + slack || st.y() < -slack || st.y() > 1 + slack)
    throw InvalidInput("point lies outside the domain");
  return st.cwiseMax(0.0).cwiseMin(1.0);
}

bool Domain::contains(const Vec2& x, double rel_tol) const {
  const double scale = domain_scale(*this);
  for (int i = 0; i < 4; ++i) {
    const Vec2& a = corners_[i];
    const Vec2& b = corners_[(i + 1) % 4];
    if (cross(b - a, x - a) < -rel_tol * scale * (b - a).norm()) return false;
  }
  return true;
}

std::string Domain::describe() const {
  std::ostringstream os;
  os << std::setprecision(17);
  switch (kind_) {
    case Kind::UnitSquare: return "unit-square";
    case Kind::Rectangle:
      os << "rectangle:" << (corners_[1] - corners_[0]).norm() << "x" << (corners_[3] - corners_[0]).norm();
      return os.str();
    case Kind::TaperedQuad:
      os << "quad";
      for (const auto& c : corners_) os << ":" << c.x() << "," << c.y();
      return os.str();
  }
  return "unknown";
}

std::string to_string(MeshFamily family) {
  switch (family) {
    case MeshFamily::SQ1: return "sq1";
    case MeshFamily::DQ2S: return "dq2s";
    case MeshFamily::SunStar: return "ss";
    case MeshFamily::InterlockingSunStar: return "iss";
    case MeshFamily::Voronoi: return "vrn";
  }
  return "unknown";
}

MeshFamily mesh_family_from_string(const std::string& name) {
  std::string s;
  for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "sq1") return MeshFamily::SQ1;
  if (s == "dq2s") return MeshFamily::DQ2S;
  if (s == "ss" || s == "s&s" || s == "sun-star") return MeshFamily::SunStar;
  if (s == "iss" || s == "is&s" || s == "interlocking-sun-star") return MeshFamily::InterlockingSunStar;
  if (s == "vrn" || s == "voronoi") return MeshFamily::Voronoi;
  throw InvalidInput("unknown mesh family '" + name + "'");
}

// ---------------------------------------------------------------------------
// PolygonalMesh

Polygon PolygonalMesh::element_polygon(std::size_t e) const {
  Polygon poly;
  poly.reserve(elements[e].size());
  for (int v : elements[e]) poly.push_back(vertices[v]);
  return poly;
}

double PolygonalMesh::element_area(std::size_t e) const { return signed_area(element_polygon(e)); }

double PolygonalMesh::total_area() const {
  double a = 0.0;
  for (std::size_t e = 0; e < elements.size(); ++e) a += element_area(e);
  return a;
}

std::vector<int> PolygonalMesh::boundary_vertices(int tag) const {
  std::set<int> out;
  for (const auto& [edge, t] : boundary_edges)
    if (t == tag) {
      out.insert(edge.first);
      out.insert(edge.second);
    }
  return {out.begin(), out.end()};
}

std::vector<int> PolygonalMesh::all_boundary_vertices() const {
  std::set<int> out;
  for (const auto& [edge, t] : boundary_edges) {
    out.insert(edge.first);
    out.insert(edge.second);
  }
  return {out.begin(), out.end()};
}

int PolygonalMesh::find_vertex(const Vec2& x, double tol) const {
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if ((vertices[i] - x).norm() <= tol) return static_cast<int>(i);
  return -1;
}

MeshReport validate(const PolygonalMesh& mesh) {
  MeshReport report;
  auto fail = [&](std::string msg) {
    report.ok = false;
    report.problems.push_back(std::move(msg));
  };
  const int nv = static_cast<int>(mesh.vertices.size());
  std::map<std::pair<int, int>, int> directed;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto& el = mesh.elements[e];
    if (el.size() < 3) fail("element " + std::to_string(e) + " has fewer than 3 vertices");
    std::set<int> unique(el.begin(), el.end());
    if (unique.size() != el.size()) fail("element " + std::to_string(e) + " repeats a vertex");
    bool indices_ok = true;
    for (int v : el)
      if (v < 0 || v >= nv) indices_ok = false;
    if (!indices_ok) {
      fail("element " + std::to_string(e) + " has an out-of-range vertex");
      continue;
    }
    const Polygon poly = mesh.element_polygon(e);
    if (!is_simple(poly)) fail("element " + std::to_string(e) + " is not simple");
    if (!(signed_area(poly) > 0)) fail("element " + std::to_string(e) + " is not counter-clockwise");
    for (std::size_t k = 0; k < el.size(); ++k) ++directed[{el[k], el[(k + 1) % el.size()]}];
  }
  for (const auto& [edge, count] : directed) {
    if (count > 1) fail("edge traversed twice in the same direction");
    const bool shared = directed.count({edge.second, edge.first}) > 0;
    const bool tagged = mesh.boundary_edges.count(edge) > 0;
    if (shared && tagged) fail("interior edge carries a boundary tag");
    if (!shared && !tagged) fail("unshared edge without boundary tag");
  }
  for (const auto& [edge, tag] : mesh.boundary_edges)
    if (!directed.count(edge)) fail("boundary tag on an edge that no element owns");
  const double domain_area = mesh.domain.area();
  if (std::abs(mesh.total_area() - domain_area) > 1e-10 * domain_area) fail("elements do not tile the domain");
  return report;
}

// ---------------------------------------------------------------------------
// Generators

PolygonalMesh generate_sq1(int level, const Domain& domain) {
  check_level(level);
  const int n = 1 << level;
  PolygonalMesh mesh;
  mesh.domain = domain;
  mesh.vertices.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.vertices.push_back(domain.map(Vec2(static_cast<double>(i) / n, static_cast<double>(j) / n)));
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) mesh.elements.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
  tag_boundary(mesh);
  return mesh;
}

PolygonalMesh generate_dq2s(int level, const Domain& domain, double distortion, std::uint64_t seed) {
  check_level(level);
  if (!(distortion >= 0 && distortion < 0.5)) throw InvalidInput("distortion must lie in [0, 0.5)");
  const int n = 1 << level;
  const int corner_count = (n + 1) * (n + 1);
  auto cid = [n](int i, int j) { return j * (n + 1) + i; };
  // Midside ids follow the corners: horizontal edges, then vertical edges.
  auto hid = [&](int i, int j) { return corner_count + j * n + i; };
  auto vid = [&](int i, int j) { return corner_count + n * (n + 1) + j * (n + 1) + i; };

  double amplitude = distortion;
  for (int attempt = 0; attempt < 20; ++attempt, amplitude *= 0.8) {
    std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ull * attempt);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    PolygonalMesh mesh;
    mesh.domain = domain;
    mesh.vertices.resize(corner_count + 2 * n * (n + 1));
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) {
        Vec2 st(static_cast<double>(i) / n, static_cast<double>(j) / n);
        if (i > 0 && i < n && j > 0 && j < n) {
          const double dx = unit(rng), dy = unit(rng);
          st += Vec2(dx, dy) * (amplitude / n);
        }
        mesh.vertices[cid(i, j)] = domain.map(st);
      }
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i < n; ++i)
        mesh.vertices[hid(i, j)] = 0.5 * (mesh.vertices[cid(i, j)] + mesh.vertices[cid(i + 1, j)]);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i <= n; ++i)
        mesh.vertices[vid(i, j)] = 0.5 * (mesh.vertices[cid(i, j)] + mesh.vertices[cid(i, j + 1)]);
    bool ok = true;
    for (int j = 0; j < n && ok; ++j)
      for (int i = 0; i < n && ok; ++i) {
        mesh.elements.push_back({cid(i, j), hid(i, j), cid(i + 1, j), vid(i + 1, j), cid(i + 1, j + 1),
                                 hid(i, j + 1), cid(i, j + 1), vid(i, j)});
        const Polygon poly = mesh.element_polygon(mesh.elements.size() - 1);
        ok = signed_area(poly) > 0 && is_simple(poly);
      }
    if (!ok) continue;
    tag_boundary(mesh);
    return mesh;
  }
  throw InvalidInput("dq2s: could not produce a valid mesh after 20 attempts");
}

PolygonalMesh generate_sun_star(int level, const Domain& domain, bool interlocking, const SunStarShape& shape) {
  check_level(level);
  const double a = shape.arm, d = shape.depth;
  if (!(a > 0 && a < 0.5 && d > 0 && 2 * d < a))
    throw InvalidInput("sun-star shape requires 0 < 2*depth < arm < 0.5");
  const int n = 1 << level;
  auto to_domain = [&](double ci, double cj, double u, double v) {
    return domain.map(Vec2((ci + u) / n, (cj + v) / n));
  };

  std::vector<Polygon> polys;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      auto P = [&](double u, double v) { return to_domain(i, j, u, v); };
      if (!interlocking) {
        polys.push_back({P(a, 0), P(1 - a, 0), P(1 - d, d), P(1, a), P(1, 1 - a), P(1 - d, 1 - d), P(1 - a, 1),
                         P(a, 1), P(d, 1 - d), P(0, 1 - a), P(0, a), P(d, d)});
        continue;
      }
      // Hooked cut through the cell centre, symmetric under a half turn.
      const std::array<Vec2, 6> cut{Vec2(0.3, 0.5),  Vec2(0.3, 0.7),  Vec2(0.45, 0.7),
                                    Vec2(0.55, 0.3), Vec2(0.7, 0.3), Vec2(0.7, 0.5)};
      Polygon lower{P(0, 0.5), P(0, a), P(d, d), P(a, 0), P(1 - a, 0), P(1 - d, d), P(1, a), P(1, 0.5)};
      for (auto it = cut.rbegin(); it != cut.rend(); ++it) lower.push_back(P(it->x(), it->y()));
      Polygon upper{P(1, 0.5), P(1, 1 - a), P(1 - d, 1 - d), P(1 - a, 1), P(a, 1), P(d, 1 - d), P(0, 1 - a), P(0, 0.5)};
      for (const auto& c : cut) upper.push_back(P(c.x(), c.y()));
      polys.push_back(std::move(lower));
      polys.push_back(std::move(upper));
    }

  // Stars: walk the eight directions around each grid vertex counter-clockwise.
  // Even directions are arm tips on grid lines, odd ones the reflex notches
  // inside the four surrounding cells.
  const std::array<Vec2, 8> dirs{Vec2(a, 0),  Vec2(d, d),   Vec2(0, a),  Vec2(-d, d),
                                 Vec2(-a, 0), Vec2(-d, -d), Vec2(0, -a), Vec2(d, -d)};
  for (int J = 0; J <= n; ++J)
    for (int I = 0; I <= n; ++I) {
      auto cell_exists = [&](int q) {
        const int ci = (q == 0 || q == 3) ? I : I - 1;
        const int cj = (q == 0 || q == 1) ? J : J - 1;
        return ci >= 0 && ci < n && cj >= 0 && cj < n;
      };
      std::array<bool, 8> present{};
      for (int q = 0; q < 4; ++q) present[2 * q + 1] = cell_exists(q);
      for (int k = 0; k < 4; ++k) present[2 * k] = present[(2 * k + 7) % 8] || present[2 * k + 1];
      auto P = [&](const Vec2& off) { return domain.map(Vec2((I + off.x()) / n, (J + off.y()) / n)); };
      int start = 0;
      bool boundary = false;
      for (int k = 0; k < 8; ++k)
        if (!present[k]) {
          boundary = true;
          start = k;
        }
      Polygon star;
      if (!boundary) {
        for (const auto& dvec : dirs) star.push_back(P(dvec));
      } else {
        // Begin right after a gap; the present directions form one arc.
        while (!present[start]) start = (start + 1) % 8;
        for (int k = 0; k < 8; ++k) {
          const int idx = (start + k) % 8;
          if (!present[idx]) break;
          star.push_back(P(dirs[idx]));
        }
        star.push_back(P(Vec2(0, 0)));
      }
      polys.push_back(std::move(star));
    }
  return assemble_mesh(domain, polys, 1e-10 * domain_scale(domain));
}

namespace {

// Clips a convex polygon to the half-plane (x - m) . normal <= 0.
Polygon clip_half_plane(const Polygon& poly, const Vec2& m, const Vec2& normal) {
  Polygon out;
  const std::size_t n = poly.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2& p = poly[k];
    const Vec2& q = poly[(k + 1) % n];
    const double dp = (p - m).dot(normal), dq = (q - m).dot(normal);
    if (dp <= 0) out.push_back(p);
    if ((dp < 0 && dq > 0) || (dp > 0 && dq < 0)) out.push_back(p + (dp / (dp - dq)) * (q - p));
  }
  return out;
}

std::vector<Polygon> voronoi_cells(const std::vector<Vec2>& seeds, const Domain& domain) {
  const std::size_t n = seeds.size();
  const Polygon box(domain.corners().begin(), domain.corners().end());
  std::vector<Polygon> cells(n);
  std::vector<std::pair<double, std::size_t>> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) order[j] = {(seeds[j] - seeds[i]).squaredNorm(), j};
    std::sort(order.begin(), order.end());
    Polygon cell = box;
    for (const auto& [dist2, j] : order) {
      if (j == i) continue;
      double r2 = 0.0;
      for (const auto& v : cell) r2 = std::max(r2, (v - seeds[i]).squaredNorm());
      // Seeds further than twice the cell radius cannot cut the cell.
      if (dist2 > 4.0 * r2) break;
      cell = clip_half_plane(cell, 0.5 * (seeds[i] + seeds[j]), seeds[j] - seeds[i]);
    }
    cells[i] = std::move(cell);
  }
  return cells;
}

}  // namespace

std::vector<Vec2> voronoi_sites(int level, const Domain& domain, int lloyd_iters, std::uint64_t seed) {
  check_level(level);
  if (lloyd_iters < 0) throw InvalidInput("lloyd_iters must be >= 0");
  const std::size_t count = std::size_t{1} << (2 * level);
  const double scale = domain_scale(domain);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec2> seeds;
  seeds.reserve(count);
  while (seeds.size() < count) {
    const double s = unit(rng), t = unit(rng);
    const Vec2 p = domain.map(Vec2(s, t));
    const bool duplicate =
        std::any_of(seeds.begin(), seeds.end(), [&](const Vec2& q) { return (q - p).norm() < 1e-8 * scale; });
    if (!duplicate) seeds.push_back(p);
  }
  for (int it = 0; it < lloyd_iters; ++it) {
    const auto cells = voronoi_cells(seeds, domain);
    for (std::size_t i = 0; i < count; ++i) seeds[i] = centroid(cells[i]);
  }
  return seeds;
}

PolygonalMesh generate_voronoi(int level, const Domain& domain, int lloyd_iters, std::uint64_t seed) {
  const double scale = domain_scale(domain);
  const auto cells = voronoi_cells(voronoi_sites(level, domain, lloyd_iters, seed), domain);
  return assemble_mesh(domain, cells, 1e-10 * scale);
}

PolygonalMesh generate(MeshFamily family, int level, const Domain& domain, const MeshOptions& options) {
  switch (family) {
    case MeshFamily::SQ1: return generate_sq1(level, domain);
    case MeshFamily::DQ2S: return generate_dq2s(level, domain, options.distortion, options.seed);
    case MeshFamily::SunStar: return generate_sun_star(level, domain, false, options.sun_star);
    case MeshFamily::InterlockingSunStar: return generate_sun_star(level, domain, true, options.sun_star);
    case MeshFamily::Voronoi: return generate_voronoi(level, domain, options.lloyd_iters, options.seed);
  }
  throw InvalidInput("unknown mesh family");
}

double mean_diameter(const PolygonalMesh& mesh) {
  if (mesh.elements.empty()) throw InvalidInput("mean_diameter: empty mesh");
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) sum += diameter(mesh.element_polygon(e));
  return sum / static_cast<double>(mesh.elements.size());
}

// ---------------------------------------------------------------------------
// VPOLY I/O

void write_vpoly(std::ostream& os, const PolygonalMesh& mesh) {
  os << "VPOLY 1\n";
  os << mesh.vertices.size() << ' ' << mesh.elements.size() << ' ' << mesh.boundary_edges.size() << '\n';
  os << std::setprecision(17);
  for (const auto& v : mesh.vertices) os << v.x() << ' ' << v.y() << '\n';
  for (const auto& el : mesh.elements) {
    os << el.size();
    for (int v : el) os << ' ' << v;
    os << '\n';
  }
  for (const auto& [edge, tag] : mesh.boundary_edges) os << edge.first << ' ' << edge.second << ' ' << tag << '\n';
}

PolygonalMesh read_vpoly(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput("vpoly: empty input");
  {
    std::istringstream hs(line);
    std::string magic;
    int version = 0;
    if (!(hs >> magic >> version) || magic != "VPOLY" || version != 1)
      throw InvalidInput("vpoly: expected header 'VPOLY 1'");
  }
  std::size_t nv = 0, ne = 0, nb = 0;
  if (!(is >> nv >> ne >> nb)) throw InvalidInput("vpoly: bad count line");
  PolygonalMesh mesh;
  mesh.vertices.resize(nv);
  for (auto& v : mesh.vertices)
    if (!(is >> v.x() >> v.y())) throw InvalidInput("vpoly: truncated vertex block");
  mesh.elements.resize(ne);
  for (auto& el : mesh.elements) {
    std::size_t k = 0;
    if (!(is >> k) || k < 3) throw InvalidInput("vpoly: bad element line");
    el.resize(k);
    for (auto& v : el)
      if (!(is >> v) || v < 0 || static_cast<std::size_t>(v) >= nv) throw InvalidInput("vpoly: bad vertex index");
  }
  for (std::size_t b = 0; b < nb; ++b) {
    int i = 0, j = 0, tag = 0;
    if (!(is >> i >> j >> tag)) throw InvalidInput("vpoly: truncated boundary block");
    if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= nv || static_cast<std::size_t>(j) >= nv)
      throw InvalidInput("vpoly: bad boundary vertex index");
    mesh.boundary_edges[{i, j}] = tag;
  }
  if (nv == 0) throw InvalidInput("vpoly: no vertices");
  // The file carries no domain; use the bounding box.
  Vec2 lo = mesh.vertices[0], hi = mesh.vertices[0];
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  if (lo.isZero() && hi == Vec2(1, 1))
    mesh.domain = Domain::unit_square();
  else if (lo.isZero())
    mesh.domain = Domain::rectangle(hi.x(), hi.y());
  else
    mesh.domain = Domain::tapered({lo, Vec2(hi.x(), lo.y()), hi, Vec2(lo.x(), hi.y())});
  return mesh;
}

}  // namespace vemhyper
