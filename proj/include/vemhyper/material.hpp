#pragma once

#include "vemhyper/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace vemhyper {

/// Plane-strain kinematic quantities at a material point. In-plane tensors
/// are 2x2; the out-of-plane stretch is fixed at one, so the invariants are
/// the 3D values of diag(C, 1).
struct Kinematics {
  Mat2 grad_u = Mat2::Zero();
  Mat2 F = Mat2::Identity();
  Mat2 C = Mat2::Identity();
  double J = 1.0;
  double I_C = 3.0, II_C = 3.0, III_C = 1.0;
  double Ibar_C = 3.0, IIbar_C = 3.0;
  /// In-plane principal stretches, descending; the third one is 1.
  double stretch1 = 1.0, stretch2 = 1.0;
  /// Isochoric stretches J^{-1/3} * stretch_i, i = 1..3.
  double iso_stretch1 = 1.0, iso_stretch2 = 1.0, iso_stretch3 = 1.0;

  bool admissible() const { return J > 0; }
};

/// F = 1 + grad_u and everything derived from it. Never throws; J <= 0 is
/// reported through `admissible()` and the isochoric fields are NaN.
Kinematics kinematics_from_grad(const Mat2& grad_u);
Kinematics kinematics_from_F(const Mat2& F);

enum class MaterialKind { NeoHookean, MooneyRivlin, Ogden };

std::string to_string(MaterialKind kind);
MaterialKind material_kind_from_string(const std::string& name);

/// Lame parameters (lambda, mu) from Young's modulus and Poisson's ratio.
std::pair<double, double> lame_from_engineering(double youngs, double poisson);

/// Isotropic hyperelastic model parameterised by engineering constants.
///
///  - neo-Hookean:   mu/2 (I_C - 3 - 2 ln J) + lambda/2 (ln J)^2
///  - Mooney-Rivlin: C10 (Ibar_C - 3) + C01 (IIbar_C - 3) + kappa/2 (ln J)^2,
///                   C10 = r C01 and mu = 2 (C10 + C01)
///  - Ogden:         sum_i mu_i/alpha_i (sum_a iso_stretch_a^alpha_i - 3)
///                   + kappa/2 (J - 1)^2, mu_i = fraction_i * mu
///
/// with kappa = E / (3 (1 - 2 nu)).
struct MaterialModel {
  MaterialKind kind = MaterialKind::NeoHookean;
  double youngs = 200.0;
  double poisson = 0.3;
  double mr_ratio = 4.0;
  std::vector<double> ogden_alphas{1.3, 5.0, -2.0};
  std::vector<double> ogden_mu_fractions{0.77, 0.1, -0.25};

  static MaterialModel neo_hookean(double youngs, double poisson);
  static MaterialModel mooney_rivlin(double youngs, double poisson, double ratio = 4.0);
  static MaterialModel ogden(double youngs, double poisson);

  /// Throws InvalidInput unless E > 0, nu in (-1, 0.5) and the model
  /// specific parameters are consistent.
  void validate() const;

  double lambda() const { return lame_from_engineering(youngs, poisson).first; }
  double mu() const { return lame_from_engineering(youngs, poisson).second; }
  double kappa() const { return youngs / (3.0 * (1.0 - 2.0 * poisson)); }
  double c01() const { return mu() / (2.0 * (1.0 + mr_ratio)); }
  double c10() const { return mr_ratio * c01(); }
};

/// Energy density, first Piola-Kirchhoff stress and its derivative. The
/// tangent is indexed by flattened pairs: A(flat(i,J), flat(k,L)) = dP_iJ/dF_kL.
struct MaterialResponse {
  double energy = 0.0;
  Mat2 stress = Mat2::Zero();
  Mat4 tangent = Mat4::Zero();
};

/// Throws NonFiniteState when J <= 0.
MaterialResponse evaluate(const MaterialModel& model, const Mat2& F);
double energy(const MaterialModel& model, const Kinematics& kin);
Mat2 first_pk(const MaterialModel& model, const Kinematics& kin);
Mat4 tangent(const MaterialModel& model, const Kinematics& kin);

/// Energy only, without derivative propagation.
double energy_density(const MaterialModel& model, const Mat2& F);

}  // namespace vemhyper

namespace vemhyper {

/// Isochoric (deviatoric) energy of the Mooney-Rivlin or Ogden model as a
/// function of three principal stretches, without the plane-strain
/// restriction. Zero for neo-Hookean, whose energy has no isochoric split.
double isochoric_energy_from_stretches(const MaterialModel& model, double s1, double s2, double s3);

}  // namespace vemhyper
