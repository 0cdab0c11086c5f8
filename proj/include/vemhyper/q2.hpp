#pragma once

#include "vemhyper/material.hpp"
#include "vemhyper/mesh.hpp"
#include "vemhyper/types.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace vemhyper {

/// Structured grid of 9-node biquadratic Lagrange quadrilaterals, 2^N cells
/// per direction, mapped to the domain with the bilinear corner map (so the
/// isoparametric geometry is exact).
class Q2Mesh {
 public:
  Q2Mesh(int level, const Domain& domain);

  int level() const { return level_; }
  int cells_per_side() const { return n_; }
  int nodes_per_side() const { return 2 * n_ + 1; }
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_cells() const { return static_cast<std::size_t>(n_) * n_; }
  const Domain& domain() const { return domain_; }
  const std::vector<Vec2>& nodes() const { return nodes_; }

  int node_id(int i, int j) const { return j * nodes_per_side() + i; }
  /// Node ids of cell (ci, cj), local ordering a + 3 b for the node at
  /// reference position (-1 + a, -1 + b).
  std::array<int, 9> cell_nodes(std::size_t cell) const;
  std::array<Vec2, 9> cell_coords(std::size_t cell) const;

  /// Boundary nodes of one side (BoundaryTag), ordered along the side.
  std::vector<int> side_nodes(int tag) const;

 private:
  int level_;
  int n_;
  Domain domain_;
  std::vector<Vec2> nodes_;
};

/// Values and reference-coordinate derivatives of the nine shape functions.
struct Q2Basis {
  std::array<double, 9> value{};
  std::array<Vec2, 9> dref{};
};
Q2Basis q2_basis(const Vec2& xi);

struct Q2ElementResult {
  double energy = 0.0;
  VecX residual;  // 18 entries, (u_x, u_y) per local node
  MatX tangent;   // 18 x 18
};

/// 3x3 Gauss quadrature of the strain energy of one cell and its
/// derivatives. Throws NonFiniteState if J <= 0 at a quadrature point.
Q2ElementResult q2_element_residual_tangent(const Q2Mesh& mesh, std::size_t cell, const VecX& d,
                                           const MaterialModel& model, bool want_tangent = true);

/// Nodal displacement field on a Q2 mesh.
struct Q2Solution {
  Q2Mesh mesh;
  VecX displacement;  // 2 * num_nodes
};

/// Displacement and its gradient at X. Cells are located through the
/// inverse bilinear domain map; points on shared cell edges go to the cell
/// with the lowest index. Throws InvalidInput outside the domain.
std::pair<Vec2, Mat2> evaluate_reference(const Q2Solution& solution, const Vec2& X);

/// Plain-text cache: header line with the key, then "nodes <n>", then one
/// "ux uy" row per node at 17 significant digits.
void write_reference(std::ostream& os, const std::string& key, const Q2Solution& solution);
/// Returns false when the stream holds a different key or node count.
bool read_reference(std::istream& is, const std::string& key, Q2Solution& solution);

}  // namespace vemhyper
