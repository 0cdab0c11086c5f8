#include "doctest.h"
#include "test_support.hpp"
#include "vemhyper/stabilization.hpp"

using namespace vemhyper;
using testsupport::brute_force_min_area;
using testsupport::rel_err;
using testsupport::series_oracle;

namespace {

std::vector<Vec2> regular_polygon(int n, double r = 1.0) {
  std::vector<Vec2> p;
  for (int i = 0; i < n; ++i) p.emplace_back(r * std::cos(2 * std::numbers::pi * i / n), r * std::sin(2 * std::numbers::pi * i / n));
  return p;
}

}  // namespace

TEST_CASE("Taylor expansion of lambda") {
  CHECK(taylor_lambda(200, 0.0) == 0.0);
  CHECK(taylor_lambda(200, 0.3) == doctest::Approx(107.646).epsilon(1e-9));
  const double ratio = std::abs(taylor_lambda(200, -1.0) / taylor_lambda(200, 0.5));
  CHECK(ratio == doctest::Approx(9.0 / 1.78125));
  CHECK_THROWS_AS(taylor_lambda(200, 0.3, 0), InvalidInput);
  CHECK_THROWS_AS(taylor_lambda(-1, 0.3), InvalidInput);
}

TEST_CASE("Taylor expansion matches the closed-form quintic and the series oracle") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 0.5);
  for (int k = 0; k < 200; ++k) {
    const double nu = u(rng);
    const double quintic = 200 * (nu + nu * nu + 3 * std::pow(nu, 3) + 5 * std::pow(nu, 4) + 11 * std::pow(nu, 5));
    CHECK(rel_err(taylor_lambda(200, nu), quintic) < 1e-12);
    for (int order : {1, 3, 7}) CHECK(rel_err(taylor_lambda(200, nu, order), series_oracle(200, nu, order)) < 1e-12);
  }
}

TEST_CASE("Taylor expansion about a shifted centre reproduces lambda's derivatives") {
  // Expanding about nu0 with high order converges to lambda near nu0.
  const double nu0 = -0.25, nu = -0.2;
  const double lambda = 200 * nu / ((1 + nu) * (1 - 2 * nu));
  CHECK(rel_err(taylor_lambda(200, nu, 12, nu0), lambda) < 1e-10);
  CHECK(rel_err(taylor_lambda(200, nu0, 5, nu0), 200 * nu0 / ((1 + nu0) * (1 - 2 * nu0))) < 1e-14);
}

TEST_CASE("T5 stays below lambda on [0, 0.5) and agrees to first order") {
  for (int k = 1; k < 100; ++k) {
    const double nu = 0.5 * k / 100;
    CHECK(taylor_lambda(200, nu) <= lame_from_engineering(200, nu).first);
  }
  const double nu = 1e-6;
  CHECK(taylor_lambda(200, nu) / lame_from_engineering(200, nu).first == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("MVEE of symmetric shapes") {
  const std::vector<Vec2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const auto e = mvee(sq);
  CHECK((e.center - Vec2(0.5, 0.5)).norm() < 1e-6);
  CHECK(e.aspect_ratio() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(e.outer_radius == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
  const std::vector<Vec2> rect{{0, 0}, {2, 0}, {2, 1}, {0, 1}};
  CHECK(mvee(rect).aspect_ratio() == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(mvee(regular_polygon(6)).aspect_ratio() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(mvee(std::vector<Vec2>{{0, 0}, {1, 1}, {2, 2}}), InvalidInput);
  CHECK_THROWS_AS(mvee(std::vector<Vec2>{{0, 0}, {1, 1}}), InvalidInput);
}

TEST_CASE("MVEE encloses every vertex of random polygons") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> nv(3, 12);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int k = 0; k < 500; ++k) {
    auto p = testsupport::random_star_polygon(rng, nv(rng), 0.1, 1.0);
    Mat2 A;
    A << u(rng), u(rng), u(rng), u(rng);
    if (std::abs(A.determinant()) < 0.1) A += 2 * Mat2::Identity();
    for (auto& v : p) v = A * v + Vec2(u(rng), u(rng));
    const auto e = mvee(p);
    for (const auto& v : p) {
      // Distance-like overshoot relative to the outer radius.
      const double over = std::sqrt(std::max(0.0, e.level(v))) - 1.0;
      CHECK(over * e.outer_radius <= 1e-8 * e.outer_radius);
    }
    CHECK(e.aspect_ratio() >= 1.0);
  }
}

TEST_CASE("MVEE is close to a brute-force optimum on small cases") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> nv(3, 6);
  for (int k = 0; k < 20; ++k) {
    const auto p = testsupport::random_star_polygon(rng, nv(rng), 0.2, 1.0);
    const double oracle = brute_force_min_area(p);
    CHECK(mvee(p).area() <= (1 + 1e-5) * oracle);
  }
}

TEST_CASE("MVEE is affine covariant") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 50; ++k) {
    const auto p = testsupport::random_star_polygon(rng, 7);
    Mat2 A;
    do {
      A << u(rng), u(rng), u(rng), u(rng);
    } while (std::abs(A.determinant()) < 0.2);
    const Vec2 t(u(rng), u(rng));
    std::vector<Vec2> q;
    for (const auto& v : p) q.push_back(A * v + t);
    const auto e = mvee(p), f = mvee(q);
    CHECK(rel_err(f.area(), std::abs(A.determinant()) * e.area()) < 1e-6);
    CHECK((f.center - (A * e.center + t)).norm() < 1e-6 * (1 + f.center.norm()));
    // Shape transforms as A^-T M A^-1.
    const Mat2 Ai = A.inverse();
    CHECK((f.shape - Ai.transpose() * e.shape * Ai).norm() < 1e-6 * f.shape.norm());
  }
}

TEST_CASE("beta is invariant under rigid motions and uniform scaling") {
  std::mt19937_64 rng(21);
  const auto p = testsupport::random_star_polygon(rng, 9);
  const auto model = MaterialModel::neo_hookean(200, 0.3);
  const double beta = stab_params(p, model).beta;
  const double c = std::cos(0.7), s = std::sin(0.7);
  Mat2 R;
  R << c, -s, s, c;
  std::vector<Vec2> q;
  for (const auto& v : p) q.push_back(3.5 * (R * v) + Vec2(10, -4));
  CHECK(rel_err(stab_params(q, model).beta, beta) < 1e-6);
}

TEST_CASE("stabilization parameters") {
  const std::vector<Vec2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const auto nh = MaterialModel::neo_hookean(200, 0.3);
  const auto p = stab_params(sq, nh);
  CHECK(p.beta == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(p.alpha == doctest::Approx(0.53823).epsilon(1e-9));
  CHECK(p.mu_hat == doctest::Approx(1.53823 * nh.mu()).epsilon(1e-6));
  CHECK(p.lambda_hat == doctest::Approx(107.646));

  StabilizationConfig off;
  off.alpha_on = false;
  const std::vector<Vec2> rect{{0, 0}, {2, 0}, {2, 1}, {0, 1}};
  for (const auto& m : {nh, MaterialModel::mooney_rivlin(200, 0.3), MaterialModel::ogden(200, 0.3)}) {
    const auto q = stab_params(rect, m, off);
    CHECK(q.beta == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
    CHECK(q.mu_hat == doctest::Approx(std::sqrt(2.0) * m.mu()).epsilon(1e-6));
  }
  // Auxetic materials: the incompressibility factor stays non-negative.
  const auto aux = stab_params(sq, MaterialModel::neo_hookean(200, -0.95));
  CHECK(aux.alpha > 0);
  CHECK(aux.lambda_hat < 0);
  CHECK(aux.mu_hat >= MaterialModel::neo_hookean(200, -0.95).mu());
}

TEST_CASE("mu_hat is non-decreasing in beta and alpha") {
  const auto m = MaterialModel::neo_hookean(200, 0.3);
  double prev = 0.0;
  for (double ar = 1.0; ar < 20; ar *= 1.3) {
    const double mu_hat = stab_params_from_aspect(ar, m).mu_hat;
    CHECK(mu_hat >= prev);
    CHECK(mu_hat >= m.mu());
    prev = mu_hat;
  }
  prev = 0.0;
  for (double nu = 0.0; nu < 0.5; nu += 0.05) {
    auto mm = MaterialModel::neo_hookean(200, 0.3);
    const double alpha = taylor_lambda(200, nu) / 200;
    const double mu_hat = 2.0 * (1 + alpha * 2.0) * mm.mu();
    CHECK(mu_hat >= prev);
    prev = mu_hat;
  }
}

TEST_CASE("stabilization energy density") {
  StabilizationParams p;
  p.mu_hat = 100;
  p.lambda_hat = 50;
  Mat2 g;
  g << 0.1, 0, 0, 0;
  const auto k = kinematics_from_grad(g);
  const double J = 1.1, I = 3.21;
  CHECK(stab_energy_density(p, k) == doctest::Approx(50 * (I - 3 - 2 * std::log(J)) + 25 * (J - 1) * (J - 1)));
  CHECK(stab_energy_density(p, kinematics_from_grad(Mat2::Zero())) == 0.0);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int t = 0; t < 20; ++t) {
    Mat2 F;
    F << 1 + u(rng), u(rng), u(rng), 1 + u(rng);
    const auto r = stab_evaluate(p, F);
    const double h = 1e-6;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        Mat2 a = F, b = F;
        a(i, j) += h;
        b(i, j) -= h;
        const double fd = (stab_evaluate(p, a).energy - stab_evaluate(p, b).energy) / (2 * h);
        CHECK(std::abs(fd - r.stress(i, j)) <= 1e-6 * std::max(1.0, r.stress.norm()));
      }
  }
  Mat2 bad;
  bad << -1, 0, 0, 1;
  CHECK_THROWS_AS(stab_evaluate(p, bad), NonFiniteState);
  CHECK_THROWS_AS(stab_energy_density(p, kinematics_from_F(bad)), NonFiniteState);
}
