#include "vemhyper/vem_element.hpp"

#include "vemhyper/mesh.hpp"

#include <cmath>

namespace vemhyper {

ElementOperators build_projection(std::span<const Vec2> polygon, const StabilizationParams& stab) {
  const int n = static_cast<int>(polygon.size());
  ElementOperators ops;
  ops.num_vertices = n;
  ops.stab = stab;
  ops.area = signed_area(polygon);
  if (!(ops.area > 0)) throw InvalidInput("element has non-positive area");

  // (Pi d)_ij = 1/|E| sum_edges int_e u_i N_j ds. With linear traces each
  // edge a->b contributes (u_a + u_b)/2 times its length-scaled outward
  // normal (dy, -dx), so vertex k collects half the normals of both edges.
  ops.projection.setZero(4, 2 * n);
  for (int k = 0; k < n; ++k) {
    const Vec2& prev = polygon[(k + n - 1) % n];
    const Vec2& next = polygon[(k + 1) % n];
    const Vec2 edge_sum = next - prev;
    const Vec2 normal(edge_sum.y(), -edge_sum.x());
    const Vec2 coeff = normal / (2.0 * ops.area);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) ops.projection(flat(i, j), 2 * k + i) = coeff(j);
  }

  for (const auto& tri : triangulate(polygon)) {
    SubTriangle t;
    t.local = tri;
    const Vec2 &a = polygon[tri[0]], &b = polygon[tri[1]], &c = polygon[tri[2]];
    Mat2 edges;
    edges.col(0) = b - a;
    edges.col(1) = c - a;
    t.area = 0.5 * edges.determinant();
    // Gradients of the barycentric shape functions.
    const Mat2 inv = edges.inverse();
    const Vec2 gb = inv.row(0).transpose();
    const Vec2 gc = inv.row(1).transpose();
    const Vec2 ga = -gb - gc;
    const std::array<Vec2, 3> grads{ga, gb, gc};
    for (int v = 0; v < 3; ++v)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) t.gradient(flat(i, j), 2 * v + i) = grads[v](j);
    ops.triangles.push_back(t);
  }
  return ops;
}

ElementOperators build_projection(const PolygonalMesh& mesh, std::size_t element, const StabilizationParams& stab) {
  return build_projection(mesh.element_polygon(element), stab);
}

Mat2 projected_gradient(const ElementOperators& ops, const VecX& d) {
  return unflatten(ops.projection * d);
}

ElementResult element_evaluate(const ElementOperators& ops, const VecX& d, const MaterialModel& model, Need need) {
  const int ndof = 2 * ops.num_vertices;
  if (d.size() != ndof) throw InvalidInput("element DOF vector has the wrong size");
  ElementResult out;
  const Mat2 F = Mat2::Identity() + projected_gradient(ops, d);

  auto gather = [&](const SubTriangle& t) {
    Eigen::Matrix<double, 6, 1> local;
    for (int v = 0; v < 3; ++v) local.segment<2>(2 * v) = d.segment<2>(2 * t.local[v]);
    return local;
  };

  if (need == Need::Energy) {
    out.consistency = ops.area * energy_density(model, F);
    double stab = -ops.area * stab_energy_density(ops.stab, kinematics_from_F(F));
    for (const auto& t : ops.triangles) {
      const Mat2 Ft = Mat2::Identity() + unflatten(t.gradient * gather(t));
      stab += t.area * stab_energy_density(ops.stab, kinematics_from_F(Ft));
    }
    out.stabilization = stab;
    return out;
  }

  const MaterialResponse psi = evaluate(model, F);
  const MaterialResponse psi_hat = stab_evaluate(ops.stab, F);
  out.consistency = ops.area * psi.energy;
  out.stabilization = -ops.area * psi_hat.energy;
  out.residual = ops.area * ops.projection.transpose() * (flatten(psi.stress) - flatten(psi_hat.stress));
  const bool want_tangent = need == Need::Tangent;
  if (want_tangent)
    out.tangent = ops.area * ops.projection.transpose() * (psi.tangent - psi_hat.tangent) * ops.projection;

  for (const auto& t : ops.triangles) {
    const Mat2 Ft = Mat2::Identity() + unflatten(t.gradient * gather(t));
    const MaterialResponse r = stab_evaluate(ops.stab, Ft);
    out.stabilization += t.area * r.energy;
    const Eigen::Matrix<double, 6, 1> rt = t.area * t.gradient.transpose() * flatten(r.stress);
    for (int v = 0; v < 3; ++v) out.residual.segment<2>(2 * t.local[v]) += rt.segment<2>(2 * v);
    if (!want_tangent) continue;
    const Eigen::Matrix<double, 6, 6> kt = t.area * t.gradient.transpose() * r.tangent * t.gradient;
    for (int v = 0; v < 3; ++v)
      for (int w = 0; w < 3; ++w)
        out.tangent.block<2, 2>(2 * t.local[v], 2 * t.local[w]) += kt.block<2, 2>(2 * v, 2 * w);
  }
  return out;
}

double element_energy(const ElementOperators& ops, const VecX& d, const MaterialModel& model) {
  return element_evaluate(ops, d, model, Need::Energy).energy();
}

VecX element_residual(const ElementOperators& ops, const VecX& d, const MaterialModel& model) {
  return element_evaluate(ops, d, model, Need::Residual).residual;
}

MatX element_tangent(const ElementOperators& ops, const VecX& d, const MaterialModel& model) {
  return element_evaluate(ops, d, model, Need::Tangent).tangent;
}

}  // namespace vemhyper
