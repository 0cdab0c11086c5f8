#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vemhyper {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
// Row-major flattening of a 2x2 tensor: (0,0) (0,1) (1,0) (1,1).
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

inline constexpr int flat(int i, int j) { return 2 * i + j; }

inline Vec4 flatten(const Mat2& m) { return Vec4(m(0, 0), m(0, 1), m(1, 0), m(1, 1)); }

inline Mat2 unflatten(const Vec4& v) {
  Mat2 m;
  m << v(0), v(1), v(2), v(3);
  return m;
}

/// Raised for malformed user input: bad mesh, bad parameters, bad config.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a deformation state is inadmissible (J <= 0 or a non-finite
/// value). The nonlinear solver treats it as a request to cut the load step.
class NonFiniteState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vemhyper
