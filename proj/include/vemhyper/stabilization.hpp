#pragma once

#include "vemhyper/geometry.hpp"
#include "vemhyper/material.hpp"
#include "vemhyper/types.hpp"

#include <span>

namespace vemhyper {

/// Degree-n Taylor polynomial of lambda(nu) = E nu / ((1 + nu)(1 - 2 nu))
/// about nu0. With the defaults (n = 5, nu0 = 0) this is
/// E (nu + nu^2 + 3 nu^3 + 5 nu^4 + 11 nu^5), which stays bounded as
/// nu -> 0.5 where lambda itself diverges.
double taylor_lambda(double youngs, double poisson, int order = 5, double nu0 = 0.0);

/// Ellipse {x : (x - center)^T shape (x - center) <= 1}.
struct Ellipse {
  Vec2 center = Vec2::Zero();
  Mat2 shape = Mat2::Identity();
  double outer_radius = 1.0;  // semi-major axis
  double inner_radius = 1.0;  // semi-minor axis
  double angle = 0.0;         // direction of the major axis, radians

  double aspect_ratio() const { return outer_radius / inner_radius; }
  double area() const;
  /// Value of (x - c)^T shape (x - c); <= 1 inside.
  double level(const Vec2& x) const;
};

/// Minimum-area enclosing ellipse of a point set (Khachiyan's barycentric
/// ascent with Todd-Yildirim away steps). The result is rescaled so every
/// point lies inside. Throws InvalidInput for fewer than three points or a
/// collinear set.
Ellipse mvee(std::span<const Vec2> points, double tol = 1e-8, int max_iter = 10000);

struct StabilizationConfig {
  bool alpha_on = true;
  int taylor_order = 5;
  double nu0 = 0.0;
  double mvee_tol = 1e-8;
};

/// Per-element constants of the stabilization energy
///   Psi_hat = mu_hat/2 (I_C - 3 - 2 ln J) + lambda_hat/2 (J - 1)^2
/// with mu_hat = beta (1 + alpha beta) mu, lambda_hat = T_n(lambda),
/// beta = sqrt(R_o / R_i) of the element's enclosing ellipse and
/// alpha = |T_n(lambda)| / E (or zero).
struct StabilizationParams {
  double beta = 1.0;
  double alpha = 0.0;
  double mu_hat = 0.0;
  double lambda_hat = 0.0;
};

StabilizationParams stab_params(std::span<const Vec2> element, const MaterialModel& model,
                                const StabilizationConfig& config = {});

/// Parameters from an already known aspect ratio.
StabilizationParams stab_params_from_aspect(double aspect_ratio, const MaterialModel& model,
                                            const StabilizationConfig& config = {});

double stab_energy_density(const StabilizationParams& params, const Kinematics& kin);

/// Energy, stress and tangent of Psi_hat at F. Throws NonFiniteState for J <= 0.
MaterialResponse stab_evaluate(const StabilizationParams& params, const Mat2& F);

}  // namespace vemhyper
