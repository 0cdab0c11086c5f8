#include "vemhyper/q2.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace vemhyper {

namespace {

constexpr std::array<double, 3> kGaussPoints{-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr std::array<double, 3> kGaussWeights{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

std::array<double, 3> lagrange(double x) { return {0.5 * x * (x - 1.0), 1.0 - x * x, 0.5 * x * (x + 1.0)}; }
std::array<double, 3> lagrange_d(double x) { return {x - 0.5, -2.0 * x, x + 0.5}; }

}  // namespace

Q2Mesh::Q2Mesh(int level, const Domain& domain) : level_(level), n_(1 << level), domain_(domain) {
  if (level < 1 || level > 9) throw InvalidInput("Q2 refinement level must be in [1, 9]");
  const int m = nodes_per_side();
  nodes_.reserve(static_cast<std::size_t>(m) * m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i)
      nodes_.push_back(domain.map(Vec2(static_cast<double>(i) / (m - 1), static_cast<double>(j) / (m - 1))));
}

std::array<int, 9> Q2Mesh::cell_nodes(std::size_t cell) const {
  const int ci = static_cast<int>(cell % n_), cj = static_cast<int>(cell / n_);
  std::array<int, 9> ids{};
  for (int b = 0; b < 3; ++b)
    for (int a = 0; a < 3; ++a) ids[a + 3 * b] = node_id(2 * ci + a, 2 * cj + b);
  return ids;
}

std::array<Vec2, 9> Q2Mesh::cell_coords(std::size_t cell) const {
  std::array<Vec2, 9> xs;
  const auto ids = cell_nodes(cell);
  for (int k = 0; k < 9; ++k) xs[k] = nodes_[ids[k]];
  return xs;
}

std::vector<int> Q2Mesh::side_nodes(int tag) const {
  const int m = nodes_per_side();
  std::vector<int> out;
  out.reserve(m);
  for (int k = 0; k < m; ++k) {
    switch (tag) {
      case kBottom: out.push_back(node_id(k, 0)); break;
      case kRight: out.push_back(node_id(m - 1, k)); break;
      case kTop: out.push_back(node_id(k, m - 1)); break;
      case kLeft: out.push_back(node_id(0, k)); break;
      default: throw InvalidInput("unknown boundary tag");
    }
  }
  return out;
}

Q2Basis q2_basis(const Vec2& xi) {
  const auto lx = lagrange(xi.x()), ly = lagrange(xi.y());
  const auto dx = lagrange_d(xi.x()), dy = lagrange_d(xi.y());
  Q2Basis b;
  for (int bb = 0; bb < 3; ++bb)
    for (int a = 0; a < 3; ++a) {
      b.value[a + 3 * bb] = lx[a] * ly[bb];
      b.dref[a + 3 * bb] = Vec2(dx[a] * ly[bb], lx[a] * dy[bb]);
    }
  return b;
}

Q2ElementResult q2_element_residual_tangent(const Q2Mesh& mesh, std::size_t cell, const VecX& d,
                                           const MaterialModel& model, bool want_tangent) {
  if (d.size() != 18) throw InvalidInput("Q2 cell DOF vector must have 18 entries");
  const auto xs = mesh.cell_coords(cell);
  Q2ElementResult out;
  out.residual = VecX::Zero(18);
  if (want_tangent) out.tangent = MatX::Zero(18, 18);
  Eigen::Matrix<double, 4, 18> B;
  for (int gj = 0; gj < 3; ++gj)
    for (int gi = 0; gi < 3; ++gi) {
      const Q2Basis basis = q2_basis(Vec2(kGaussPoints[gi], kGaussPoints[gj]));
      Mat2 jac = Mat2::Zero();  // dX/dxi
      for (int k = 0; k < 9; ++k) jac += xs[k] * basis.dref[k].transpose();
      const double det = jac.determinant();
      if (!(det > 0)) throw InvalidInput("Q2 cell with non-positive Jacobian");
      const Mat2 jinv = jac.inverse();
      B.setZero();
      for (int k = 0; k < 9; ++k) {
        const Vec2 g = jinv.transpose() * basis.dref[k];
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) B(flat(i, j), 2 * k + i) = g(j);
      }
      const double w = kGaussWeights[gi] * kGaussWeights[gj] * det;
      const Mat2 F = Mat2::Identity() + unflatten(B * d);
      const MaterialResponse r = evaluate(model, F);
      out.energy += w * r.energy;
      out.residual += w * B.transpose() * flatten(r.stress);
      if (want_tangent) out.tangent += w * B.transpose() * r.tangent * B;
    }
  return out;
}

std::pair<Vec2, Mat2> evaluate_reference(const Q2Solution& solution, const Vec2& X) {
  const Q2Mesh& mesh = solution.mesh;
  const Vec2 st = mesh.domain().inverse_map(X);
  const int n = mesh.cells_per_side();
  auto locate = [n](double s) {
    // Lowest cell index among those whose closure contains s.
    const int c = static_cast<int>(std::ceil(s * n)) - 1;
    return std::clamp(c, 0, n - 1);
  };
  const int ci = locate(st.x()), cj = locate(st.y());
  const std::size_t cell = static_cast<std::size_t>(cj) * n + ci;
  const auto xs = mesh.cell_coords(cell);
  const auto ids = mesh.cell_nodes(cell);

  // Newton inversion of the isoparametric map, started at the cell-local
  // parameter position.
  Vec2 xi(2.0 * (st.x() * n - ci) - 1.0, 2.0 * (st.y() * n - cj) - 1.0);
  Q2Basis basis;
  Mat2 jac;
  for (int it = 0; it < 30; ++it) {
    basis = q2_basis(xi);
    Vec2 x = Vec2::Zero();
    jac.setZero();
    for (int k = 0; k < 9; ++k) {
      x += basis.value[k] * xs[k];
      jac += xs[k] * basis.dref[k].transpose();
    }
    const Vec2 r = x - X;
    const Vec2 step = jac.partialPivLu().solve(r);
    xi -= step;
    if (step.norm() <= 1e-12) break;
  }
  basis = q2_basis(xi);
  jac.setZero();
  for (int k = 0; k < 9; ++k) jac += xs[k] * basis.dref[k].transpose();
  const Mat2 jinv = jac.inverse();
  Vec2 u = Vec2::Zero();
  Mat2 grad = Mat2::Zero();
  for (int k = 0; k < 9; ++k) {
    const Vec2 uk = solution.displacement.segment<2>(2 * ids[k]);
    u += basis.value[k] * uk;
    grad += uk * (jinv.transpose() * basis.dref[k]).transpose();
  }
  return {u, grad};
}

void write_reference(std::ostream& os, const std::string& key, const Q2Solution& solution) {
  os << "Q2REF " << key << '\n';
  os << "nodes " << solution.mesh.num_nodes() << '\n';
  os << std::setprecision(17);
  for (std::size_t i = 0; i < solution.mesh.num_nodes(); ++i)
    os << solution.displacement(2 * i) << ' ' << solution.displacement(2 * i + 1) << '\n';
}

bool read_reference(std::istream& is, const std::string& key, Q2Solution& solution) {
  std::string line;
  if (!std::getline(is, line) || line != "Q2REF " + key) return false;
  std::string word;
  std::size_t count = 0;
  if (!(is >> word >> count) || word != "nodes" || count != solution.mesh.num_nodes()) return false;
  VecX u(2 * count);
  for (std::size_t i = 0; i < 2 * count; ++i)
    if (!(is >> u(i))) return false;
  solution.displacement = std::move(u);
  return true;
}

}  // namespace vemhyper
