#include "doctest.h"
#include "test_support.hpp"
#include "vemhyper/mesh.hpp"
#include "vemhyper/vem_element.hpp"

using namespace vemhyper;

namespace {

VecX affine_dofs(const Polygon& p, const Mat2& A, const Vec2& c) {
  VecX d(2 * p.size());
  for (std::size_t k = 0; k < p.size(); ++k) d.segment<2>(2 * k) = A * p[k] + c;
  return d;
}

// Gradient by the divergence theorem on each triangle fan from the centroid,
// independent of the projection matrix.
Mat2 fan_gradient(const Polygon& p, const VecX& d) {
  Mat2 g = Mat2::Zero();
  double area = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const std::size_t n = (k + 1) % p.size();
    const Vec2 e = p[n] - p[k];
    const Vec2 normal(e.y(), -e.x());
    const Vec2 um = 0.5 * (d.segment<2>(2 * k) + d.segment<2>(2 * n));
    g += um * normal.transpose();
    area += 0.5 * (p[k].x() * p[n].y() - p[n].x() * p[k].y());
  }
  return g / area;
}

}  // namespace

TEST_CASE("projection reproduces affine gradients on concave elements") {
  const auto mesh = generate(MeshFamily::InterlockingSunStar, 2, Domain::unit_square());
  Mat2 A;
  A << 0.3, -0.1, 0.2, 0.05;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto poly = mesh.element_polygon(e);
    const auto ops = build_projection(poly);
    CHECK((projected_gradient(ops, affine_dofs(poly, A, Vec2(1, 2))) - A).norm() < 1e-12);
    CHECK(ops.triangles.size() == poly.size() - 2);
    double sum = 0;
    for (const auto& t : ops.triangles) sum += t.area;
    CHECK(testsupport::rel_err(sum, ops.area) < 1e-12);
  }
}

TEST_CASE("projection equals the boundary-integral oracle for arbitrary data") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 50; ++k) {
    const auto poly = testsupport::random_star_polygon(rng, 3 + k % 9);
    const auto ops = build_projection(poly);
    VecX d(2 * poly.size());
    for (auto& x : d) x = u(rng);
    CHECK((projected_gradient(ops, d) - fan_gradient(poly, d)).norm() < 1e-12);
  }
}

TEST_CASE("unit square projection") {
  const Polygon sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const auto ops = build_projection(sq);
  CHECK(ops.area == doctest::Approx(1.0));
  CHECK(ops.projection.cols() == 8);
  // Stretch in x of the right edge only.
  VecX d = VecX::Zero(8);
  d(2) = 0.1;
  d(4) = 0.1;
  const Mat2 g = projected_gradient(ops, d);
  CHECK(g(0, 0) == doctest::Approx(0.1));
  CHECK(std::abs(g(1, 1)) < 1e-15);
}

TEST_CASE("affine states carry no stabilization energy") {
  const auto model = MaterialModel::neo_hookean(200, 0.3);
  const auto mesh = generate(MeshFamily::SunStar, 2, Domain::unit_square());
  Mat2 A;
  A << 0.2, 0.1, -0.05, -0.1;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto poly = mesh.element_polygon(e);
    const auto ops = build_projection(poly, stab_params(poly, model));
    const auto r = element_evaluate(ops, affine_dofs(poly, A, Vec2::Zero()), model);
    CHECK(std::abs(r.stabilization) <= 1e-12 * r.consistency);
    CHECK(r.consistency == doctest::Approx(ops.area * energy_density(model, Mat2::Identity() + A)));
  }
}

TEST_CASE("element residual and tangent match finite differences") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-0.01, 0.01);
  const MeshFamily families[] = {MeshFamily::DQ2S, MeshFamily::SunStar, MeshFamily::InterlockingSunStar,
                                 MeshFamily::Voronoi};
  for (MeshFamily f : families) {
    const auto mesh = generate(f, 1, Domain::unit_square());
    for (const auto& model :
         {MaterialModel::neo_hookean(200, 0.3), MaterialModel::mooney_rivlin(200, 0.45), MaterialModel::ogden(200, -0.5)}) {
      const std::size_t e = rng() % mesh.num_elements();
      const auto poly = mesh.element_polygon(e);
      const auto ops = build_projection(poly, stab_params(poly, model));
      // Smooth field: nodal noise would fold thin sub-triangles.
      const double a0 = u(rng), a1 = u(rng), k = 3.0 + 10 * u(rng);
      VecX d(2 * poly.size());
      for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& x = poly[i];
        d(2 * i) = 5 * a0 * std::sin(k * x.x() + x.y());
        d(2 * i + 1) = 5 * a1 * std::cos(x.x() - k * x.y());
      }
      const auto r = element_evaluate(ops, d, model);
      const double h = 1e-6;
      VecX fd_r(d.size());
      MatX fd_k(d.size(), d.size());
      for (int i = 0; i < d.size(); ++i) {
        VecX a = d, b = d;
        a(i) += h;
        b(i) -= h;
        fd_r(i) = (element_energy(ops, a, model) - element_energy(ops, b, model)) / (2 * h);
        fd_k.col(i) = (element_residual(ops, a, model) - element_residual(ops, b, model)) / (2 * h);
      }
      CHECK((r.residual - fd_r).norm() <= 1e-6 * fd_r.norm());
      CHECK((r.tangent - fd_k).norm() <= 1e-5 * fd_k.norm());
      CHECK((r.tangent - r.tangent.transpose()).norm() <= 1e-12 * r.tangent.norm());
    }
  }
}

TEST_CASE("element energy is invariant under vertex-cycle rotation") {
  const auto model = MaterialModel::mooney_rivlin(200, 0.3);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  const auto poly = testsupport::random_star_polygon(rng, 8, 0.6, 1.0);
  VecX d(16);
  for (auto& x : d) x = u(rng);
  const auto ops = build_projection(poly, stab_params(poly, model));
  Polygon rot(poly.begin() + 3, poly.end());
  rot.insert(rot.end(), poly.begin(), poly.begin() + 3);
  VecX dr(16);
  dr << d.segment(6, 10), d.segment(0, 6);
  const auto ops_r = build_projection(rot, stab_params(rot, model));
  CHECK(element_evaluate(ops_r, dr, model, Need::Energy).consistency ==
        doctest::Approx(element_evaluate(ops, d, model, Need::Energy).consistency).epsilon(1e-12));
}

TEST_CASE("inverted states are reported") {
  const Polygon sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const auto model = MaterialModel::neo_hookean(200, 0.3);
  const auto ops = build_projection(sq, stab_params(sq, model));
  VecX d = VecX::Zero(8);
  d(2) = -2.0;  // pull vertex 1 past vertex 0
  CHECK_THROWS_AS(element_evaluate(ops, d, model), NonFiniteState);
  CHECK_THROWS_AS(build_projection(Polygon{{0, 0}, {1, 1}, {2, 2}}), InvalidInput);
}
