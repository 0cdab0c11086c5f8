#include "vemhyper/material.hpp"

#include "vemhyper/dual.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace vemhyper {

using detail::Dual2;

namespace {

// Below this ratio of eigenvalue half-gap to mean the Ogden stretch sum is
// evaluated by its even series in the gap instead of the closed form.
constexpr double kSeriesSwitch = 1e-2;
constexpr int kSeriesTerms = 8;

// lambda_1^(2p) + lambda_2^(2p) for the eigenvalues m +- sqrt(q) of C.
// The sum is an analytic function of q, so near q = 0 the series
//   2 sum_k g^(2k)(m) q^k / (2k)!,  g(x) = x^p
// replaces the closed form whose derivatives divide by sqrt(q).
template <class T>
T stretch_power_sum(const T& m, const T& q, double p) {
  using namespace detail;
  const double mv = value(m), qv = value(q);
  if (qv > (kSeriesSwitch * mv) * (kSeriesSwitch * mv)) {
    const T s = sqrt(q);
    return pow(m + s, p) + pow(m - s, p);
  }
  T sum = T(0.0);
  T qk = T(1.0);
  double falling = 1.0;   // p (p-1) ... (p-2k+1)
  double factorial = 1.0; // (2k)!
  for (int k = 0; k <= kSeriesTerms; ++k) {
    if (k > 0) {
      falling *= (p - (2 * k - 2)) * (p - (2 * k - 1));
      factorial *= (2.0 * k - 1.0) * (2.0 * k);
      qk = qk * q;
    }
    sum = sum + (2.0 * falling / factorial) * (pow(m, p - 2.0 * k) * qk);
  }
  return sum;
}

template <class T>
T energy_impl(const MaterialModel& model, const T& f11, const T& f12, const T& f21, const T& f22) {
  using namespace detail;
  const T J = f11 * f22 - f12 * f21;
  if (!(value(J) > 0) || !std::isfinite(value(J))) throw NonFiniteState("deformation gradient with J <= 0");
  const T c11 = f11 * f11 + f21 * f21;
  const T c22 = f12 * f12 + f22 * f22;
  const T trace = c11 + c22;
  switch (model.kind) {
    case MaterialKind::NeoHookean: {
      const auto [lambda, mu] = lame_from_engineering(model.youngs, model.poisson);
      const T lnJ = log(J);
      return 0.5 * mu * (trace + 1.0 - 3.0 - 2.0 * lnJ) + 0.5 * lambda * (lnJ * lnJ);
    }
    case MaterialKind::MooneyRivlin: {
      const T I = trace + 1.0;
      const T II = J * J + trace;
      const T lnJ = log(J);
      const T ibar = pow(J, -2.0 / 3.0) * I;
      const T iibar = pow(J, -4.0 / 3.0) * II;
      return model.c10() * (ibar - 3.0) + model.c01() * (iibar - 3.0) + 0.5 * model.kappa() * (lnJ * lnJ);
    }
    case MaterialKind::Ogden: {
      const double mu = model.mu();
      const T m = 0.5 * trace;
      const T q = m * m - J * J;
      T w = T(0.0);
      for (std::size_t i = 0; i < model.ogden_alphas.size(); ++i) {
        const double alpha = model.ogden_alphas[i];
        const double mu_i = model.ogden_mu_fractions[i] * mu;
        const T in_plane = stretch_power_sum(m, q, 0.5 * alpha);
        const T iso_sum = pow(J, -alpha / 3.0) * (in_plane + 1.0);
        w = w + (mu_i / alpha) * (iso_sum - 3.0);
      }
      const T jm1 = J - 1.0;
      return w + 0.5 * model.kappa() * (jm1 * jm1);
    }
  }
  return T(std::numeric_limits<double>::quiet_NaN());
}

}  // namespace

std::pair<double, double> lame_from_engineering(double youngs, double poisson) {
  if (!(youngs > 0)) throw InvalidInput("Young's modulus must be positive");
  if (!(poisson > -1.0 && poisson < 0.5)) throw InvalidInput("Poisson's ratio must lie in (-1, 0.5)");
  const double lambda = youngs * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
  const double mu = youngs / (2.0 * (1.0 + poisson));
  return {lambda, mu};
}

std::string to_string(MaterialKind kind) {
  switch (kind) {
    case MaterialKind::NeoHookean: return "neo-hookean";
    case MaterialKind::MooneyRivlin: return "mooney-rivlin";
    case MaterialKind::Ogden: return "ogden";
  }
  return "unknown";
}

MaterialKind material_kind_from_string(const std::string& name) {
  std::string s;
  for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "neo-hookean" || s == "neohookean" || s == "nh") return MaterialKind::NeoHookean;
  if (s == "mooney-rivlin" || s == "mooneyrivlin" || s == "mr") return MaterialKind::MooneyRivlin;
  if (s == "ogden") return MaterialKind::Ogden;
  throw InvalidInput("unknown material model '" + name + "'");
}

MaterialModel MaterialModel::neo_hookean(double youngs, double poisson) {
  MaterialModel m;
  m.kind = MaterialKind::NeoHookean;
  m.youngs = youngs;
  m.poisson = poisson;
  m.validate();
  return m;
}

MaterialModel MaterialModel::mooney_rivlin(double youngs, double poisson, double ratio) {
  MaterialModel m;
  m.kind = MaterialKind::MooneyRivlin;
  m.youngs = youngs;
  m.poisson = poisson;
  m.mr_ratio = ratio;
  m.validate();
  return m;
}

MaterialModel MaterialModel::ogden(double youngs, double poisson) {
  MaterialModel m;
  m.kind = MaterialKind::Ogden;
  m.youngs = youngs;
  m.poisson = poisson;
  m.validate();
  return m;
}

void MaterialModel::validate() const {
  lame_from_engineering(youngs, poisson);
  if (kind == MaterialKind::MooneyRivlin && !(mr_ratio > 0)) throw InvalidInput("mr_ratio must be positive");
  if (kind == MaterialKind::Ogden) {
    if (ogden_alphas.empty() || ogden_alphas.size() != ogden_mu_fractions.size())
      throw InvalidInput("ogden_alphas and ogden_mu_fractions must be non-empty and of equal length");
    double ratio = 0.0;
    for (std::size_t i = 0; i < ogden_alphas.size(); ++i) {
      if (ogden_alphas[i] == 0.0) throw InvalidInput("Ogden exponents must be non-zero");
      ratio += 0.5 * ogden_alphas[i] * ogden_mu_fractions[i];
    }
    if (std::abs(ratio - 1.0) > 5e-3)
      throw InvalidInput("Ogden terms must reproduce the shear modulus: sum(alpha_i mu_i)/2 = mu within 0.5%");
  }
}

Kinematics kinematics_from_F(const Mat2& F) {
  Kinematics k;
  k.F = F;
  k.grad_u = F - Mat2::Identity();
  k.C = F.transpose() * F;
  k.J = F.determinant();
  const double tr = k.C.trace();
  const double det = k.C.determinant();
  k.I_C = tr + 1.0;
  k.II_C = det + tr;
  k.III_C = det;
  const double m = 0.5 * tr;
  const double s = std::sqrt(std::max(0.0, m * m - det));
  const double e1 = m + s;
  const double e2 = std::max(0.0, m - s);
  k.stretch1 = std::sqrt(e1);
  k.stretch2 = std::sqrt(e2);
  if (k.J > 0) {
    const double scale = std::pow(k.J, -1.0 / 3.0);
    k.Ibar_C = scale * scale * k.I_C;
    k.IIbar_C = std::pow(k.J, -4.0 / 3.0) * k.II_C;
    k.iso_stretch1 = scale * k.stretch1;
    k.iso_stretch2 = scale * k.stretch2;
    k.iso_stretch3 = scale;
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    k.Ibar_C = k.IIbar_C = k.iso_stretch1 = k.iso_stretch2 = k.iso_stretch3 = nan;
  }
  return k;
}

Kinematics kinematics_from_grad(const Mat2& grad_u) { return kinematics_from_F(Mat2::Identity() + grad_u); }

MaterialResponse evaluate(const MaterialModel& model, const Mat2& F) {
  const Dual2 psi = energy_impl(model, Dual2::variable(F(0, 0), 0), Dual2::variable(F(0, 1), 1),
                                Dual2::variable(F(1, 0), 2), Dual2::variable(F(1, 1), 3));
  if (!std::isfinite(psi.v) || !psi.g.allFinite() || !psi.h.allFinite())
    throw NonFiniteState("non-finite material response");
  MaterialResponse r;
  r.energy = psi.v;
  r.stress = unflatten(psi.g);
  r.tangent = 0.5 * (psi.h + psi.h.transpose());
  return r;
}

double energy_density(const MaterialModel& model, const Mat2& F) {
  const double psi = energy_impl<double>(model, F(0, 0), F(0, 1), F(1, 0), F(1, 1));
  if (!std::isfinite(psi)) throw NonFiniteState("non-finite energy");
  return psi;
}

double energy(const MaterialModel& model, const Kinematics& kin) { return energy_density(model, kin.F); }
Mat2 first_pk(const MaterialModel& model, const Kinematics& kin) { return evaluate(model, kin.F).stress; }
Mat4 tangent(const MaterialModel& model, const Kinematics& kin) { return evaluate(model, kin.F).tangent; }

}  // namespace vemhyper

namespace vemhyper {

double isochoric_energy_from_stretches(const MaterialModel& model, double s1, double s2, double s3) {
  const double J = s1 * s2 * s3;
  if (!(J > 0)) throw NonFiniteState("stretches must be positive");
  const double scale = std::cbrt(1.0 / J);
  const double b1 = scale * s1, b2 = scale * s2, b3 = scale * s3;
  switch (model.kind) {
    case MaterialKind::NeoHookean: return 0.0;
    case MaterialKind::MooneyRivlin: {
      const double ibar = b1 * b1 + b2 * b2 + b3 * b3;
      const double iibar = b1 * b1 * b2 * b2 + b2 * b2 * b3 * b3 + b3 * b3 * b1 * b1;
      return model.c10() * (ibar - 3.0) + model.c01() * (iibar - 3.0);
    }
    case MaterialKind::Ogden: {
      double w = 0.0;
      for (std::size_t i = 0; i < model.ogden_alphas.size(); ++i) {
        const double a = model.ogden_alphas[i];
        w += model.ogden_mu_fractions[i] * model.mu() / a *
             (std::pow(b1, a) + std::pow(b2, a) + std::pow(b3, a) - 3.0);
      }
      return w;
    }
  }
  return 0.0;
}

}  // namespace vemhyper
