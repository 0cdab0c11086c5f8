#pragma once

#include "vemhyper/types.hpp"

#include <cmath>

namespace vemhyper::detail {

/// Second-order forward-mode number over the four entries of a 2x2 tensor.
/// Carries the value, gradient and (symmetric) Hessian of a scalar function.
struct Dual2 {
  double v = 0.0;
  Vec4 g = Vec4::Zero();
  Mat4 h = Mat4::Zero();

  Dual2() = default;
  Dual2(double value) : v(value) {}  // NOLINT: implicit promotion of constants
  static Dual2 variable(double value, int index) {
    Dual2 d(value);
    d.g(index) = 1.0;
    return d;
  }
};

// Applies a scalar function given its value and first two derivatives.
inline Dual2 chain(const Dual2& x, double f0, double f1, double f2) {
  Dual2 r;
  r.v = f0;
  r.g = f1 * x.g;
  r.h = f1 * x.h + f2 * (x.g * x.g.transpose());
  return r;
}

inline Dual2 operator+(const Dual2& a, const Dual2& b) {
  Dual2 r;
  r.v = a.v + b.v;
  r.g = a.g + b.g;
  r.h = a.h + b.h;
  return r;
}
inline Dual2 operator-(const Dual2& a, const Dual2& b) {
  Dual2 r;
  r.v = a.v - b.v;
  r.g = a.g - b.g;
  r.h = a.h - b.h;
  return r;
}
inline Dual2 operator-(const Dual2& a) {
  Dual2 r;
  r.v = -a.v;
  r.g = -a.g;
  r.h = -a.h;
  return r;
}
inline Dual2 operator*(const Dual2& a, const Dual2& b) {
  Dual2 r;
  r.v = a.v * b.v;
  r.g = a.v * b.g + b.v * a.g;
  const Mat4 outer = a.g * b.g.transpose();
  r.h = a.v * b.h + b.v * a.h + outer + outer.transpose();
  return r;
}
inline Dual2 operator*(double s, const Dual2& a) {
  Dual2 r;
  r.v = s * a.v;
  r.g = s * a.g;
  r.h = s * a.h;
  return r;
}
inline Dual2 operator*(const Dual2& a, double s) { return s * a; }
inline Dual2 operator+(const Dual2& a, double s) {
  Dual2 r = a;
  r.v += s;
  return r;
}
inline Dual2 operator+(double s, const Dual2& a) { return a + s; }
inline Dual2 operator-(const Dual2& a, double s) { return a + (-s); }
inline Dual2 operator-(double s, const Dual2& a) { return (-a) + s; }

inline Dual2 reciprocal(const Dual2& a) {
  const double inv = 1.0 / a.v;
  return chain(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}
inline Dual2 operator/(const Dual2& a, const Dual2& b) { return a * reciprocal(b); }
inline Dual2 operator/(const Dual2& a, double s) { return (1.0 / s) * a; }
inline Dual2 operator/(double s, const Dual2& a) { return s * reciprocal(a); }

inline Dual2 log(const Dual2& a) { return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
inline Dual2 sqrt(const Dual2& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Dual2 pow(const Dual2& a, double p) {
  const double f0 = std::pow(a.v, p);
  return chain(a, f0, p * f0 / a.v, p * (p - 1.0) * f0 / (a.v * a.v));
}

inline double value(double x) { return x; }
inline double value(const Dual2& x) { return x.v; }

using std::log;
using std::pow;
using std::sqrt;

}  // namespace vemhyper::detail
