#include "vemhyper/stabilization.hpp"

#include "vemhyper/dual.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vemhyper {

using detail::Dual2;

double taylor_lambda(double youngs, double poisson, int order, double nu0) {
  if (!(youngs > 0)) throw InvalidInput("Young's modulus must be positive");
  if (order < 1) throw InvalidInput("Taylor order must be at least 1");
  if (!(nu0 > -1.0 && nu0 < 0.5)) throw InvalidInput("expansion point must lie in (-1, 0.5)");
  // lambda = E/3 [ 1/(1 - 2 nu) - 1/(1 + nu) ], so the k-th Taylor
  // coefficient is E/3 [ 2^k (1 - 2 nu0)^-(k+1) - (-1)^k (1 + nu0)^-(k+1) ].
  const double h = poisson - nu0;
  const double a = 1.0 / (1.0 - 2.0 * nu0);
  const double b = 1.0 / (1.0 + nu0);
  double sum = 0.0;
  double ak = a, bk = b, two_k = 1.0, sign = 1.0, hk = 1.0;
  for (int k = 0; k <= order; ++k) {
    sum += (two_k * ak - sign * bk) * hk;
    ak *= a;
    bk *= b;
    two_k *= 2.0;
    sign = -sign;
    hk *= h;
  }
  return youngs / 3.0 * sum;
}

double Ellipse::area() const { return std::numbers::pi * outer_radius * inner_radius; }

double Ellipse::level(const Vec2& x) const {
  const Vec2 r = x - center;
  return r.dot(shape * r);
}

Ellipse mvee(std::span<const Vec2> points, double tol, int max_iter) {
  const int n = static_cast<int>(points.size());
  if (n < 3) throw InvalidInput("mvee: need at least three points");
  double span2 = 0.0, area2 = 0.0;
  for (int i = 1; i < n; ++i) span2 = std::max(span2, (points[i] - points[0]).squaredNorm());
  for (int i = 1; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Vec2 a = points[i] - points[0], b = points[j] - points[0];
      area2 = std::max(area2, std::abs(a.x() * b.y() - a.y() * b.x()));
    }
  if (!(area2 > 1e-12 * span2)) throw InvalidInput("mvee: points are collinear");

  // Work relative to the first point to keep the lifted moments well scaled.
  const Vec2 origin = points[0];
  const double scale = std::sqrt(span2);
  Eigen::Matrix<double, 3, Eigen::Dynamic> lifted(3, n);
  for (int i = 0; i < n; ++i) {
    const Vec2 p = (points[i] - origin) / scale;
    lifted.col(i) << p.x(), p.y(), 1.0;
  }
  constexpr double dim = 2.0;
  Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / n);
  Eigen::VectorXd m(n);
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::Matrix3d X = lifted * u.asDiagonal() * lifted.transpose();
    const Eigen::Matrix3d Xinv = X.inverse();
    for (int i = 0; i < n; ++i) m(i) = lifted.col(i).dot(Xinv * lifted.col(i));
    int up = 0, down = -1;
    for (int i = 0; i < n; ++i) {
      if (m(i) > m(up)) up = i;
      if (u(i) > 0 && (down < 0 || m(i) < m(down))) down = i;
    }
    const double gap_up = m(up) / (dim + 1.0) - 1.0;
    const double gap_down = 1.0 - m(down) / (dim + 1.0);
    if (std::max(gap_up, gap_down) <= tol) break;
    const int k = gap_up >= gap_down ? up : down;
    double step = (m(k) - dim - 1.0) / ((dim + 1.0) * (m(k) - 1.0));
    if (k == down && gap_up < gap_down) step = std::max(step, -u(k) / (1.0 - u(k)));
    u *= (1.0 - step);
    u(k) += step;
    u = u.cwiseMax(0.0);
  }

  Eigen::Matrix<double, 2, Eigen::Dynamic> pts = lifted.topRows<2>();
  const Vec2 c = pts * u;
  const Mat2 second = pts * u.asDiagonal() * pts.transpose() - c * c.transpose();
  Mat2 A = second.inverse() / dim;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec2 r = pts.col(i) - c;
    worst = std::max(worst, r.dot(A * r));
  }
  if (worst > 1.0) A /= worst;

  Ellipse e;
  e.center = origin + scale * c;
  e.shape = A / (scale * scale);
  const Eigen::SelfAdjointEigenSolver<Mat2> eig(e.shape);
  const Vec2 values = eig.eigenvalues();  // ascending
  e.outer_radius = 1.0 / std::sqrt(values(0));
  e.inner_radius = 1.0 / std::sqrt(values(1));
  const Vec2 major = eig.eigenvectors().col(0);
  e.angle = std::atan2(major.y(), major.x());
  return e;
}

StabilizationParams stab_params_from_aspect(double aspect_ratio, const MaterialModel& model,
                                            const StabilizationConfig& config) {
  if (!(aspect_ratio >= 1.0 - 1e-12)) throw InvalidInput("aspect ratio must be >= 1");
  const double t = taylor_lambda(model.youngs, model.poisson, config.taylor_order, config.nu0);
  StabilizationParams p;
  p.beta = std::sqrt(std::max(1.0, aspect_ratio));
  // T5 is negative for auxetic materials; its magnitude scales the shear term.
  p.alpha = config.alpha_on ? std::abs(t) / model.youngs : 0.0;
  p.mu_hat = p.beta * (1.0 + p.alpha * p.beta) * model.mu();
  p.lambda_hat = t;
  return p;
}

StabilizationParams stab_params(std::span<const Vec2> element, const MaterialModel& model,
                                const StabilizationConfig& config) {
  const Ellipse e = mvee(element, config.mvee_tol);
  return stab_params_from_aspect(e.aspect_ratio(), model, config);
}

namespace {

template <class T>
T stab_energy_impl(const StabilizationParams& p, const T& f11, const T& f12, const T& f21, const T& f22) {
  using namespace detail;
  const T J = f11 * f22 - f12 * f21;
  if (!(value(J) > 0) || !std::isfinite(value(J))) throw NonFiniteState("deformation gradient with J <= 0");
  const T trace = f11 * f11 + f12 * f12 + f21 * f21 + f22 * f22;
  const T jm1 = J - 1.0;
  return 0.5 * p.mu_hat * (trace + 1.0 - 3.0 - 2.0 * log(J)) + 0.5 * p.lambda_hat * (jm1 * jm1);
}

}  // namespace

double stab_energy_density(const StabilizationParams& params, const Kinematics& kin) {
  const Mat2& F = kin.F;
  return stab_energy_impl<double>(params, F(0, 0), F(0, 1), F(1, 0), F(1, 1));
}

MaterialResponse stab_evaluate(const StabilizationParams& params, const Mat2& F) {
  const Dual2 psi = stab_energy_impl(params, Dual2::variable(F(0, 0), 0), Dual2::variable(F(0, 1), 1),
                                     Dual2::variable(F(1, 0), 2), Dual2::variable(F(1, 1), 3));
  MaterialResponse r;
  r.energy = psi.v;
  r.stress = unflatten(psi.g);
  r.tangent = 0.5 * (psi.h + psi.h.transpose());
  return r;
}

}  // namespace vemhyper
