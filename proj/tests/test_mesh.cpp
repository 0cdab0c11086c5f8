#include "doctest.h"
#include "test_support.hpp"
#include "vemhyper/geometry.hpp"
#include "vemhyper/mesh.hpp"

#include <map>
#include <sstream>

using namespace vemhyper;
using testsupport::shoelace;

namespace {

const MeshFamily kFamilies[] = {MeshFamily::SQ1, MeshFamily::DQ2S, MeshFamily::SunStar,
                                MeshFamily::InterlockingSunStar, MeshFamily::Voronoi};

// Every directed edge appears once; interior edges appear in both
// orientations and boundary edges are exactly the tagged ones.
bool edges_consistent(const PolygonalMesh& m) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& el : m.elements)
    for (std::size_t k = 0; k < el.size(); ++k) ++count[{el[k], el[(k + 1) % el.size()]}];
  std::size_t boundary = 0;
  for (const auto& [e, c] : count) {
    if (c != 1) return false;
    if (!count.count({e.second, e.first})) {
      ++boundary;
      if (!m.boundary_edges.count(e)) return false;
    }
  }
  return boundary == m.boundary_edges.size();
}

double area_sum(const PolygonalMesh& m) {
  double a = 0.0;
  for (std::size_t e = 0; e < m.num_elements(); ++e) a += shoelace(m.element_polygon(e));
  return a;
}

int convex_count(const PolygonalMesh& m) {
  int c = 0;
  for (std::size_t e = 0; e < m.num_elements(); ++e) c += !is_concave(m.element_polygon(e));
  return c;
}

}  // namespace

TEST_CASE("domain maps and inverse maps") {
  const Domain cook = Domain::tapered({Vec2(0, 0), Vec2(48, 44), Vec2(48, 60), Vec2(0, 44)});
  CHECK(cook.map(Vec2(1, 1)).isApprox(Vec2(48, 60)));
  CHECK(cook.area() == doctest::Approx(0.5 * (44 + 16) * 48));
  const Vec2 st(0.3, 0.7);
  CHECK((cook.inverse_map(cook.map(st)) - st).norm() < 1e-12);
  CHECK(cook.contains(Vec2(24, 40)));
  CHECK_FALSE(cook.contains(Vec2(24, 70)));
  CHECK_THROWS_AS(cook.inverse_map(Vec2(-5, 80)), InvalidInput);
  CHECK_THROWS_AS(Domain::rectangle(-1, 1), InvalidInput);
}

TEST_CASE("SQ1 counts and areas") {
  const auto m3 = generate_sq1(3, Domain::unit_square());
  CHECK(m3.num_elements() == 64);
  CHECK(m3.num_vertices() == 81);
  const auto m1 = generate_sq1(1, Domain::unit_square());
  REQUIRE(m1.num_elements() == 4);
  for (std::size_t e = 0; e < 4; ++e) CHECK(m1.element_area(e) == doctest::Approx(0.25));
  const auto m2 = generate_sq1(2, Domain::rectangle(2, 1));
  CHECK(m2.num_elements() == 16);
  CHECK(m2.total_area() == doctest::Approx(2.0));
  CHECK_THROWS_AS(generate_sq1(0, Domain::unit_square()), InvalidInput);
}

TEST_CASE("DQ2S without distortion is structured with midside nodes") {
  const auto m = generate_dq2s(3, Domain::unit_square(), 0.0, 1);
  REQUIRE(m.num_elements() == 64);
  for (std::size_t e = 0; e < m.num_elements(); ++e) {
    CHECK(m.elements[e].size() == 8);
    CHECK(m.element_area(e) == doctest::Approx(1.0 / 64).epsilon(1e-12));
  }
}

TEST_CASE("DQ2S with distortion stays simple and tiles the domain") {
  const auto m = generate_dq2s(3, Domain::unit_square(), 0.3, 1);
  CHECK(m.num_elements() == 64);
  CHECK(std::abs(area_sum(m) - 1.0) < 1e-10);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto m2 = generate_dq2s(2, Domain::unit_square(), 0.45, seed);
    for (std::size_t e = 0; e < m2.num_elements(); ++e) CHECK(testsupport::brute_force_simple(m2.element_polygon(e)));
  }
  // Midside nodes sit at physical edge midpoints and corners move.
  const auto& el = m.elements[27];
  for (int k = 1; k < 8; k += 2) {
    const Vec2 mid = 0.5 * (m.vertices[el[k - 1]] + m.vertices[el[(k + 1) % 8]]);
    CHECK((m.vertices[el[k]] - mid).norm() < 1e-12);
  }
  CHECK_THROWS_AS(generate_dq2s(2, Domain::unit_square(), 0.5, 1), InvalidInput);
}

TEST_CASE("sun and star meshes") {
  const auto ss = generate_sun_star(3, Domain::unit_square(), false);
  CHECK(convex_count(ss) == 64);  // suns are the convex cells
  CHECK(ss.num_elements() == 64 + 81);
  CHECK(std::abs(ss.total_area() - 1.0) < 1e-10);
  const auto iss1 = generate_sun_star(1, Domain::unit_square(), true);
  const auto ss1 = generate_sun_star(1, Domain::unit_square(), false);
  CHECK(iss1.num_elements() == ss1.num_elements() + 4);
  for (bool interlocking : {false, true}) {
    const auto m = generate_sun_star(2, Domain::unit_square(), interlocking);
    CHECK(convex_count(m) < static_cast<int>(m.num_elements()));
  }
  // Interlocking halves are non-convex and equal in area.
  const auto iss = generate_sun_star(2, Domain::unit_square(), true);
  int concave_halves = 0;
  for (std::size_t e = 0; e < iss.num_elements(); ++e)
    if (iss.elements[e].size() > 8 && is_concave(iss.element_polygon(e))) ++concave_halves;
  CHECK(concave_halves >= 32);
  CHECK_THROWS_AS(generate_sun_star(2, Domain::unit_square(), false, SunStarShape{0.3, 0.2}), InvalidInput);
}

TEST_CASE("Voronoi meshes") {
  const auto m = generate_voronoi(3, Domain::unit_square(), 10, 7);
  CHECK(m.num_elements() == 64);
  CHECK(convex_count(m) == 64);
  CHECK(std::abs(area_sum(m) - 1.0) < 1e-10);

  const auto sites = voronoi_sites(1, Domain::unit_square(), 0, 3);
  const auto m1 = generate_voronoi(1, Domain::unit_square(), 0, 3);
  REQUIRE(m1.num_elements() == 4);
  for (std::size_t e = 0; e < 4; ++e) {
    const auto poly = m1.element_polygon(e);
    // Site strictly inside its convex cell.
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const Vec2 a = poly[k], b = poly[(k + 1) % poly.size()], p = sites[e];
      CHECK((b - a).x() * (p - a).y() - (b - a).y() * (p - a).x() > 0);
    }
  }

  auto spread = [](const PolygonalMesh& mesh) {
    double lo = 1e300, hi = 0;
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
      lo = std::min(lo, mesh.element_area(e));
      hi = std::max(hi, mesh.element_area(e));
    }
    return hi / lo;
  };
  CHECK(spread(generate_voronoi(2, Domain::unit_square(), 50, 11)) <
        spread(generate_voronoi(2, Domain::unit_square(), 0, 11)));
}

TEST_CASE("tiling, edge sharing and simplicity for every family and level") {
  const Domain domains[] = {Domain::unit_square(), Domain::tapered({Vec2(0, 0), Vec2(48, 44), Vec2(48, 60), Vec2(0, 44)})};
  for (const auto& domain : domains)
    for (MeshFamily f : kFamilies)
      for (int n = 1; n <= 5; ++n) {
        CAPTURE(to_string(f));
        CAPTURE(n);
        const auto m = generate(f, n, domain);
        CHECK(testsupport::rel_err(area_sum(m), domain.area()) < 1e-10);
        CHECK(edges_consistent(m));
        const auto report = validate(m);
        CHECK(report.ok);
        if (n <= 3)
          for (std::size_t e = 0; e < m.num_elements(); ++e) CHECK(testsupport::brute_force_simple(m.element_polygon(e)));
      }
}

TEST_CASE("generators are deterministic") {
  for (MeshFamily f : kFamilies) {
    const auto a = generate(f, 3, Domain::unit_square(), MeshOptions{0.3, 9});
    const auto b = generate(f, 3, Domain::unit_square(), MeshOptions{0.3, 9});
    CHECK(a.vertices == b.vertices);
    CHECK(a.elements == b.elements);
    CHECK(a.boundary_edges == b.boundary_edges);
  }
}

TEST_CASE("boundary tags follow the domain sides") {
  const auto m = generate(MeshFamily::Voronoi, 2, Domain::rectangle(2, 1));
  for (int v : m.boundary_vertices(kBottom)) CHECK(std::abs(m.vertices[v].y()) < 1e-12);
  for (int v : m.boundary_vertices(kRight)) CHECK(std::abs(m.vertices[v].x() - 2) < 1e-12);
  for (int v : m.boundary_vertices(kTop)) CHECK(std::abs(m.vertices[v].y() - 1) < 1e-12);
  for (int v : m.boundary_vertices(kLeft)) CHECK(std::abs(m.vertices[v].x()) < 1e-12);
  CHECK(m.find_vertex(Vec2(0, 1)) >= 0);
  CHECK(m.find_vertex(Vec2(0.123, 0.456)) == -1);
}

TEST_CASE("mean element diameter") {
  for (int n = 1; n <= 4; ++n)
    CHECK(mean_diameter(generate_sq1(n, Domain::unit_square())) == doctest::Approx(std::sqrt(2.0) / (1 << n)));
  PolygonalMesh single;
  single.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  single.elements = {{0, 1, 2, 3}};
  CHECK(mean_diameter(single) == doctest::Approx(std::sqrt(2.0)));
  for (MeshFamily f : kFamilies) {
    const double h3 = mean_diameter(generate(f, 3, Domain::unit_square()));
    const double h4 = mean_diameter(generate(f, 4, Domain::unit_square()));
    if (f == MeshFamily::SQ1) CHECK(h3 / h4 == doctest::Approx(2.0).epsilon(0.05));
    CHECK(h4 < h3);
  }
}

TEST_CASE("VPOLY round trip is exact") {
  const auto m = generate(MeshFamily::InterlockingSunStar, 2, Domain::tapered({Vec2(0, 0), Vec2(48, 44), Vec2(48, 60), Vec2(0, 44)}));
  std::stringstream ss;
  write_vpoly(ss, m);
  const auto r = read_vpoly(ss);
  CHECK(r.vertices == m.vertices);
  CHECK(r.elements == m.elements);
  CHECK(r.boundary_edges == m.boundary_edges);
  std::stringstream bad("VPOLY 1\n3 1 0\n0 0\n1 0\n");
  CHECK_THROWS_AS(read_vpoly(bad), InvalidInput);
}
