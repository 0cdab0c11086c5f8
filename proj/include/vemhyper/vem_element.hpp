#pragma once

#include "vemhyper/geometry.hpp"
#include "vemhyper/material.hpp"
#include "vemhyper/stabilization.hpp"
#include "vemhyper/types.hpp"

#include <array>
#include <span>
#include <vector>

namespace vemhyper {

struct PolygonalMesh;

/// Linear map from the three vertex displacements of a subtriangle
/// (u_ax, u_ay, u_bx, u_by, u_cx, u_cy) to its constant flattened gradient.
struct SubTriangle {
  std::array<int, 3> local{};
  double area = 0.0;
  Eigen::Matrix<double, 4, 6> gradient = Eigen::Matrix<double, 4, 6>::Zero();
};

/// Reference-configuration operators of one lowest-order virtual element.
/// Element DOFs are ordered (u_0x, u_0y, u_1x, u_1y, ...).
struct ElementOperators {
  int num_vertices = 0;
  double area = 0.0;
  /// vec(Pi d) = projection * d: the edge-wise boundary integral of the
  /// linear trace against the outward normal, divided by |E|.
  Eigen::Matrix<double, 4, Eigen::Dynamic> projection;
  std::vector<SubTriangle> triangles;
  StabilizationParams stab;
};

/// Builds the projection and the ear-clipped subtriangulation. Throws
/// InvalidInput for non-simple or zero-area polygons.
ElementOperators build_projection(std::span<const Vec2> polygon, const StabilizationParams& stab = {});
ElementOperators build_projection(const PolygonalMesh& mesh, std::size_t element,
                                  const StabilizationParams& stab = {});

/// Projected displacement gradient Pi d.
Mat2 projected_gradient(const ElementOperators& ops, const VecX& d);

enum class Need { Energy, Residual, Tangent };

struct ElementResult {
  double consistency = 0.0;    // |E| Psi(Pi d)
  double stabilization = 0.0;  // sum_T |T| [Psi_hat(grad u|T) - Psi_hat(Pi d)]
  VecX residual;
  MatX tangent;

  double energy() const { return consistency + stabilization; }
};

/// Energy (and, on request, its gradient and Hessian with respect to d).
/// Throws NonFiniteState if J <= 0 for the projection or any subtriangle.
ElementResult element_evaluate(const ElementOperators& ops, const VecX& d, const MaterialModel& model,
                               Need need = Need::Tangent);

double element_energy(const ElementOperators& ops, const VecX& d, const MaterialModel& model);
VecX element_residual(const ElementOperators& ops, const VecX& d, const MaterialModel& model);
MatX element_tangent(const ElementOperators& ops, const VecX& d, const MaterialModel& model);

}  // namespace vemhyper
