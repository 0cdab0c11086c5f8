#include "doctest.h"
#include "test_support.hpp"
#include "vemhyper/analysis.hpp"
#include "vemhyper/q2.hpp"

#include <sstream>

using namespace vemhyper;

TEST_CASE("Q2 basis: partition of unity and nodal interpolation") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 20; ++k) {
    const auto b = q2_basis(Vec2(u(rng), u(rng)));
    double s = 0;
    Vec2 ds = Vec2::Zero();
    for (int a = 0; a < 9; ++a) {
      s += b.value[a];
      ds += b.dref[a];
    }
    CHECK(s == doctest::Approx(1.0));
    CHECK(ds.norm() < 1e-12);
  }
  for (int a = 0; a < 3; ++a)
    for (int c = 0; c < 3; ++c) {
      const auto b = q2_basis(Vec2(-1 + a, -1 + c));
      for (int n = 0; n < 9; ++n) CHECK(b.value[n] == doctest::Approx(n == a + 3 * c ? 1.0 : 0.0));
    }
}

TEST_CASE("Q2 mesh layout") {
  const Q2Mesh m(2, Domain::rectangle(2, 1));
  CHECK(m.cells_per_side() == 4);
  CHECK(m.num_nodes() == 81);
  CHECK(m.side_nodes(kBottom).size() == 9);
  const auto coords = m.cell_coords(0);
  CHECK(coords[0].isApprox(Vec2(0, 0)));
  CHECK(coords[8].isApprox(Vec2(0.5, 0.25)));
}

TEST_CASE("Q2 reproduces affine fields under affine Dirichlet data") {
  const auto domain = benchmark_domain(Benchmark::Cook);
  auto disc = std::make_shared<Q2Discretization>(Q2Mesh(2, domain), MaterialModel::ogden(200, 0.3));
  Mat2 A;
  A << 0.02, 0.01, -0.015, 0.03;
  const Vec2 c(0.5, -0.2);
  const auto state = solve_with_stepping(make_patch_setup(disc, A, c));
  REQUIRE(state.converged);
  double err = 0;
  for (std::size_t i = 0; i < disc->num_nodes(); ++i)
    err = std::max(err, (state.displacement.segment<2>(2 * i) - (A * disc->nodes()[i] + c)).norm());
  CHECK(err < 1e-9);
  const Q2Solution sol{disc->mesh(), state.displacement};
  for (const Vec2 X : {Vec2(10, 30), Vec2(48, 60), Vec2(24, 44), Vec2(0, 0)}) {
    const auto [u, g] = evaluate_reference(sol, X);
    CHECK((u - (A * X + c)).norm() < 1e-9);
    CHECK((g - A).norm() < 1e-9);
  }
  CHECK_THROWS_AS(evaluate_reference(sol, Vec2(60, 0)), InvalidInput);
}

TEST_CASE("Q2 element derivatives match finite differences") {
  const Q2Mesh m(1, Domain::unit_square());
  const auto model = MaterialModel::mooney_rivlin(200, 0.3);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.02, 0.02);
  VecX d(18);
  for (auto& x : d) x = u(rng);
  const auto r = q2_element_residual_tangent(m, 1, d, model);
  const double h = 1e-6;
  for (int i = 0; i < 18; ++i) {
    VecX a = d, b = d;
    a(i) += h;
    b(i) -= h;
    const auto ra = q2_element_residual_tangent(m, 1, a, model), rb = q2_element_residual_tangent(m, 1, b, model);
    CHECK(std::abs((ra.energy - rb.energy) / (2 * h) - r.residual(i)) <= 1e-6 * r.residual.norm());
    CHECK(((ra.residual - rb.residual) / (2 * h) - r.tangent.col(i)).norm() <= 1e-5 * r.tangent.norm());
  }
}

TEST_CASE("reference cache round trip") {
  const Q2Mesh m(1, Domain::unit_square());
  Q2Solution sol{m, VecX::LinSpaced(2 * m.num_nodes(), 0.0, 1.0 / 3.0)};
  std::stringstream ss;
  write_reference(ss, "key one", sol);
  Q2Solution back{m, VecX()};
  CHECK(read_reference(ss, "key one", back));
  CHECK(back.displacement == sol.displacement);
  std::stringstream ss2;
  write_reference(ss2, "key one", sol);
  CHECK_FALSE(read_reference(ss2, "key two", back));
}
