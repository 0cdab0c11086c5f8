#include "vemhyper/solver.hpp"

#include <Eigen/SparseCholesky>
#ifdef VEMHYPER_HAVE_CHOLMOD
#include <Eigen/CholmodSupport>
#endif

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace vemhyper {

namespace {

std::vector<int> element_dofs(const std::vector<int>& nodes) {
  std::vector<int> dofs;
  dofs.reserve(2 * nodes.size());
  for (int n : nodes) {
    dofs.push_back(2 * n);
    dofs.push_back(2 * n + 1);
  }
  return dofs;
}

VecX gather(const VecX& u, const std::vector<int>& dofs) {
  VecX d(dofs.size());
  for (std::size_t k = 0; k < dofs.size(); ++k) d(k) = u(dofs[k]);
  return d;
}

// Loops over elements, scattering residuals into `residual` and tangent
// entries through `dof_map` (global DOF -> reduced index, -1 to drop).
double assemble_into(const Discretization& disc, const VecX& u, Need need, VecX& residual,
                     std::vector<Eigen::Triplet<double>>* triplets, const std::vector<int>* dof_map) {
  double energy = 0.0;
  for (std::size_t e = 0; e < disc.num_elements(); ++e) {
    const auto dofs = element_dofs(disc.element_nodes(e));
    const ElementContribution c = disc.element(e, gather(u, dofs), need);
    energy += c.energy;
    if (need == Need::Energy) continue;
    for (std::size_t a = 0; a < dofs.size(); ++a) residual(dofs[a]) += c.residual(a);
    if (!triplets) continue;
    for (std::size_t a = 0; a < dofs.size(); ++a) {
      const int ra = dof_map ? (*dof_map)[dofs[a]] : dofs[a];
      if (ra < 0) continue;
      for (std::size_t b = 0; b < dofs.size(); ++b) {
        const int rb = dof_map ? (*dof_map)[dofs[b]] : dofs[b];
        if (rb < 0) continue;
        triplets->emplace_back(ra, rb, c.tangent(a, b));
      }
    }
  }
  return energy;
}

struct LinearSolveResult {
  bool ok = false;
  VecX x;
};

LinearSolveResult solve_spd(const SparseMatrix& K, const VecX& rhs) {
  LinearSolveResult out;
  auto refine = [&](auto& solver) {
    out.x = solver.solve(rhs);
    // Iterative refinement towards the 1e-13 linear-residual target.
    for (int pass = 0; pass < 2; ++pass) {
      const VecX r = rhs - K * out.x;
      if (r.norm() <= 1e-13 * rhs.norm()) break;
      out.x += solver.solve(r);
    }
    out.ok = out.x.allFinite();
  };
#ifdef VEMHYPER_HAVE_CHOLMOD
  {
    Eigen::CholmodSupernodalLLT<SparseMatrix, Eigen::Lower> llt;
    // Indefinite tangents are expected away from equilibrium; the LDLT
    // fallback handles them, so CHOLMOD stays quiet.
    llt.cholmod().print = 0;
    llt.compute(K);
    if (llt.info() == Eigen::Success) {
      refine(llt);
      if (out.ok) return out;
    }
  }
#endif
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower> ldlt;
  ldlt.compute(K);
  if (ldlt.info() != Eigen::Success) return out;
  refine(ldlt);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Discretizations

VemDiscretization::VemDiscretization(PolygonalMesh mesh, MaterialModel model, StabilizationConfig stab)
    : mesh_(std::move(mesh)), model_(std::move(model)), stab_(stab) {
  model_.validate();
  ops_.reserve(mesh_.num_elements());
  for (std::size_t e = 0; e < mesh_.num_elements(); ++e) {
    const Polygon poly = mesh_.element_polygon(e);
    ops_.push_back(build_projection(poly, stab_params(poly, model_, stab_)));
  }
}

ElementContribution VemDiscretization::element(std::size_t e, const VecX& d, Need need) const {
  ElementResult r = element_evaluate(ops_[e], d, model_, need);
  return {r.energy(), std::move(r.residual), std::move(r.tangent)};
}

std::vector<BoundarySegment> VemDiscretization::boundary_segments() const {
  std::vector<BoundarySegment> out;
  out.reserve(mesh_.boundary_edges.size());
  for (const auto& [edge, tag] : mesh_.boundary_edges) out.push_back({{edge.first, edge.second}, tag});
  return out;
}

VecX VemDiscretization::body_force_vector(const Vec2& force) const {
  VecX f = VecX::Zero(2 * num_nodes());
  for (std::size_t e = 0; e < mesh_.num_elements(); ++e) {
    const double w = ops_[e].area / static_cast<double>(mesh_.elements[e].size());
    for (int v : mesh_.elements[e]) f.segment<2>(2 * v) += w * force;
  }
  return f;
}

Q2Discretization::Q2Discretization(Q2Mesh mesh, MaterialModel model) : mesh_(std::move(mesh)), model_(std::move(model)) {
  model_.validate();
}

std::vector<int> Q2Discretization::element_nodes(std::size_t e) const {
  const auto ids = mesh_.cell_nodes(e);
  return {ids.begin(), ids.end()};
}

ElementContribution Q2Discretization::element(std::size_t e, const VecX& d, Need need) const {
  if (need == Need::Energy) {
    // The quadrature loop is cheap enough that energy-only calls reuse it.
    Q2ElementResult r = q2_element_residual_tangent(mesh_, e, d, model_, false);
    return {r.energy, {}, {}};
  }
  Q2ElementResult r = q2_element_residual_tangent(mesh_, e, d, model_, need == Need::Tangent);
  return {r.energy, std::move(r.residual), std::move(r.tangent)};
}

std::vector<BoundarySegment> Q2Discretization::boundary_segments() const {
  std::vector<BoundarySegment> out;
  for (int tag : {kBottom, kRight, kTop, kLeft}) {
    auto side = mesh_.side_nodes(tag);
    // Sides run in increasing parameter; top and left are reversed to keep
    // the counter-clockwise orientation of the domain boundary.
    if (tag == kTop || tag == kLeft) std::reverse(side.begin(), side.end());
    for (std::size_t k = 0; k + 2 < side.size(); k += 2) out.push_back({{side[k], side[k + 1], side[k + 2]}, tag});
  }
  return out;
}

VecX Q2Discretization::body_force_vector(const Vec2& force) const {
  VecX f = VecX::Zero(2 * num_nodes());
  static constexpr std::array<double, 3> gp{-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr std::array<double, 3> gw{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  for (std::size_t c = 0; c < mesh_.num_cells(); ++c) {
    const auto xs = mesh_.cell_coords(c);
    const auto ids = mesh_.cell_nodes(c);
    for (int gj = 0; gj < 3; ++gj)
      for (int gi = 0; gi < 3; ++gi) {
        const Q2Basis b = q2_basis(Vec2(gp[gi], gp[gj]));
        Mat2 jac = Mat2::Zero();
        for (int k = 0; k < 9; ++k) jac += xs[k] * b.dref[k].transpose();
        const double w = gw[gi] * gw[gj] * jac.determinant();
        for (int k = 0; k < 9; ++k) f.segment<2>(2 * ids[k]) += w * b.value[k] * force;
      }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Problem

void ProblemSetup::validate() const {
  if (!disc) throw InvalidInput("problem has no discretization");
  if (dirichlet.empty()) throw InvalidInput("problem needs a non-empty Dirichlet boundary");
  std::set<std::pair<int, int>> seen;
  const int nn = static_cast<int>(disc->num_nodes());
  for (const auto& bc : dirichlet) {
    if (bc.node < 0 || bc.node >= nn || bc.component < 0 || bc.component > 1)
      throw InvalidInput("Dirichlet condition refers to a missing DOF");
    if (!seen.insert({bc.node, bc.component}).second) throw InvalidInput("duplicate Dirichlet condition");
  }
  for (const auto& load : loads)
    for (int n : load.segment.nodes)
      if (n < 0 || n >= nn) throw InvalidInput("load segment refers to a missing node");
  if (steps < 1) throw InvalidInput("steps must be >= 1");
  if (newton.max_iter < 1) throw InvalidInput("newton.max_iter must be >= 1");
  if (!(newton.tol_rel > 0)) throw InvalidInput("newton.tol_rel must be positive");
}

int SolutionState::total_iterations() const {
  int total = 0;
  for (const auto& h : history) total += h.iterations;
  return total;
}

VecX external_force(const ProblemSetup& setup) {
  const Discretization& disc = *setup.disc;
  VecX f = disc.body_force_vector(setup.body_force);
  const auto& x = disc.nodes();
  for (const auto& load : setup.loads) {
    const auto& nodes = load.segment.nodes;
    const double length = (x[nodes.back()] - x[nodes.front()]).norm();
    if (nodes.size() == 2) {
      // Two-point Gauss on a linear trace reduces to half the load per node.
      for (int n : nodes) f.segment<2>(2 * n) += 0.5 * length * load.traction;
    } else if (nodes.size() == 3) {
      f.segment<2>(2 * nodes[0]) += length / 6.0 * load.traction;
      f.segment<2>(2 * nodes[1]) += 4.0 * length / 6.0 * load.traction;
      f.segment<2>(2 * nodes[2]) += length / 6.0 * load.traction;
    } else {
      throw InvalidInput("load segment must have 2 or 3 nodes");
    }
  }
  return f;
}

Assembly assemble(const ProblemSetup& setup, const VecX& displacement, double load_factor, bool want_tangent) {
  const Discretization& disc = *setup.disc;
  const int ndof = static_cast<int>(2 * disc.num_nodes());
  Assembly out;
  out.residual = VecX::Zero(ndof);
  std::vector<Eigen::Triplet<double>> triplets;
  const double internal = assemble_into(disc, displacement, want_tangent ? Need::Tangent : Need::Residual,
                                        out.residual, want_tangent ? &triplets : nullptr, nullptr);
  const VecX f = external_force(setup);
  out.residual -= load_factor * f;
  out.energy = internal - load_factor * f.dot(displacement);
  if (want_tangent) {
    out.tangent.resize(ndof, ndof);
    out.tangent.setFromTriplets(triplets.begin(), triplets.end());
  }
  return out;
}

double total_potential_energy(const ProblemSetup& setup, const VecX& displacement, double load_factor) {
  VecX unused;
  const double internal = assemble_into(*setup.disc, displacement, Need::Energy, unused, nullptr, nullptr);
  return internal - load_factor * external_force(setup).dot(displacement);
}

SolutionState newton_solve(const ProblemSetup& setup, const SolutionState& state, double load_factor) {
  setup.validate();
  const Discretization& disc = *setup.disc;
  const int ndof = static_cast<int>(2 * disc.num_nodes());
  SolutionState out = state;
  if (out.displacement.size() != ndof) out.displacement = VecX::Zero(ndof);

  std::vector<int> dof_map(ndof, 0);
  for (const auto& bc : setup.dirichlet) dof_map[2 * bc.node + bc.component] = -1;
  int nfree = 0;
  for (int& m : dof_map)
    if (m == 0) m = nfree++;

  const VecX f_ext = external_force(setup);
  VecX f_free(nfree);
  for (int g = 0; g < ndof; ++g)
    if (dof_map[g] >= 0) f_free(dof_map[g]) = load_factor * f_ext(g);

  StepRecord record;
  record.load_factor = load_factor;

  // Prescribed-displacement increments enter through the tangent at the
  // previous state, so the first iterate is the linearised response rather
  // than a boundary layer of distorted elements.
  VecX du_c = VecX::Zero(ndof);
  bool moved = false;
  for (const auto& bc : setup.dirichlet) {
    const int g = 2 * bc.node + bc.component;
    du_c(g) = load_factor * bc.value - out.displacement(g);
    moved |= du_c(g) != 0.0;
  }
  int predictor_solves = 0;
  double predictor_load = 0.0;
  if (moved) {
    try {
      const Assembly a = assemble(setup, out.displacement, load_factor, true);
      const VecX rhs_full = -(a.residual + a.tangent * du_c);
      VecX rhs(nfree);
      for (int g = 0; g < ndof; ++g)
        if (dof_map[g] >= 0) rhs(dof_map[g]) = rhs_full(g);
      predictor_load = rhs.norm();
      std::vector<Eigen::Triplet<double>> kff;
      for (int k = 0; k < a.tangent.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a.tangent, k); it; ++it)
          if (dof_map[it.row()] >= 0 && dof_map[it.col()] >= 0)
            kff.emplace_back(dof_map[it.row()], dof_map[it.col()], it.value());
      SparseMatrix K(nfree, nfree);
      K.setFromTriplets(kff.begin(), kff.end());
      const LinearSolveResult lin = nfree > 0 ? solve_spd(K, rhs) : LinearSolveResult{true, VecX()};
      if (lin.ok) {
        for (int g = 0; g < ndof; ++g)
          if (dof_map[g] >= 0) out.displacement(g) += lin.x(dof_map[g]);
        predictor_solves = 1;
      }
    } catch (const NonFiniteState&) {
      // Fall back to lifting the boundary values alone.
    }
  }
  for (const auto& bc : setup.dirichlet) out.displacement(2 * bc.node + bc.component) = load_factor * bc.value;

  out.converged = false;
  double reference = 0.0;
  double last_step = std::numeric_limits<double>::infinity();
  try {
    record.energy_start = total_potential_energy(setup, out.displacement, load_factor);
    for (int it = 0; it <= setup.newton.max_iter; ++it) {
      VecX residual = VecX::Zero(ndof);
      std::vector<Eigen::Triplet<double>> triplets;
      assemble_into(disc, out.displacement, Need::Tangent, residual, &triplets, &dof_map);
      residual -= load_factor * f_ext;
      VecX r_free(nfree);
      for (int g = 0; g < ndof; ++g)
        if (dof_map[g] >= 0) r_free(dof_map[g]) = residual(g);
      const double norm = r_free.norm();
      if (!std::isfinite(norm)) throw NonFiniteState("non-finite residual");
      record.residual_norms.push_back(norm);
      if (it == 0) reference = std::max({norm, f_free.norm(), predictor_load});
      const bool small = norm <= setup.newton.tol_rel * reference || norm <= setup.newton.tol_abs;
      // Quadratic convergence stalls at the rounding floor; accept a stalled
      // iteration once the residual is already tiny.
      const bool stalled =
          it >= 3 && norm > 0.5 * record.residual_norms[record.residual_norms.size() - 2] &&
          (norm <= 1e-8 * reference || last_step <= 1e-10 * out.displacement.norm());
      if (small || stalled) {
        record.converged = true;
        record.iterations = it + predictor_solves;
        break;
      }
      if (it == setup.newton.max_iter) {
        record.failure = "no convergence within newton.max_iter iterations";
        record.iterations = it + predictor_solves;
        break;
      }
      SparseMatrix K(nfree, nfree);
      K.setFromTriplets(triplets.begin(), triplets.end());
      const LinearSolveResult lin = solve_spd(K, -r_free);
      if (!lin.ok) {
        record.failure = "linear solve failed";
        record.iterations = it;
        break;
      }
      for (int g = 0; g < ndof; ++g)
        if (dof_map[g] >= 0) out.displacement(g) += lin.x(dof_map[g]);
      last_step = lin.x.norm();
    }
    if (record.converged) record.energy_end = total_potential_energy(setup, out.displacement, load_factor);
  } catch (const NonFiniteState& e) {
    record.converged = false;
    record.failure = e.what();
    record.iterations = static_cast<int>(record.residual_norms.size());
  }
  out.converged = record.converged;
  if (out.converged) out.load_factor = load_factor;
  out.history.push_back(std::move(record));
  return out;
}

SolutionState solve_with_stepping(const ProblemSetup& setup) {
  setup.validate();
  SolutionState state;
  state.displacement = VecX::Zero(2 * setup.disc->num_nodes());
  state.converged = true;
  const double base = 1.0 / setup.steps;
  double increment = base;
  int depth = 0;
  int successes = 0;
  constexpr int kMaxDepth = 10;
  while (state.load_factor < 1.0 - 1e-12) {
    const double target = std::min(1.0, state.load_factor + increment);
    SolutionState trial = newton_solve(setup, state, target);
    if (trial.converged) {
      state = std::move(trial);
      ++successes;
      if (depth > 0 && successes >= 2) {
        increment *= 2.0;
        --depth;
        successes = 0;
      }
      continue;
    }
    state.history.push_back(trial.history.back());
    successes = 0;
    if (!setup.adaptive || depth >= kMaxDepth) {
      state.converged = false;
      return state;
    }
    increment *= 0.5;
    ++depth;
  }
  state.converged = true;
  state.load_factor = 1.0;
  return state;
}

Vec2 reaction_resultant(const ProblemSetup& setup, const SolutionState& state) {
  const Assembly a = assemble(setup, state.displacement, state.load_factor, false);
  Vec2 total = Vec2::Zero();
  for (const auto& bc : setup.dirichlet) total(bc.component) += a.residual(2 * bc.node + bc.component);
  return total;
}

double min_jacobian(const Discretization& disc, const VecX& displacement) {
  double jmin = std::numeric_limits<double>::infinity();
  if (const auto* vem = dynamic_cast<const VemDiscretization*>(&disc)) {
    for (std::size_t e = 0; e < vem->num_elements(); ++e) {
      const auto& ops = vem->operators(e);
      const VecX d = gather(displacement, element_dofs(vem->element_nodes(e)));
      jmin = std::min(jmin, (Mat2::Identity() + projected_gradient(ops, d)).determinant());
      for (const auto& t : ops.triangles) {
        Eigen::Matrix<double, 6, 1> local;
        for (int v = 0; v < 3; ++v) local.segment<2>(2 * v) = d.segment<2>(2 * t.local[v]);
        jmin = std::min(jmin, (Mat2::Identity() + unflatten(t.gradient * local)).determinant());
      }
    }
    return jmin;
  }
  if (const auto* q2 = dynamic_cast<const Q2Discretization*>(&disc)) {
    static constexpr std::array<double, 3> gp{-0.7745966692414834, 0.0, 0.7745966692414834};
    for (std::size_t c = 0; c < q2->num_elements(); ++c) {
      const auto xs = q2->mesh().cell_coords(c);
      const auto ids = q2->mesh().cell_nodes(c);
      for (double a : gp)
        for (double b : gp) {
          const Q2Basis basis = q2_basis(Vec2(a, b));
          Mat2 jac = Mat2::Zero(), gu = Mat2::Zero();
          for (int k = 0; k < 9; ++k) jac += xs[k] * basis.dref[k].transpose();
          const Mat2 jinv = jac.inverse();
          for (int k = 0; k < 9; ++k)
            gu += displacement.segment<2>(2 * ids[k]) * (jinv.transpose() * basis.dref[k]).transpose();
          jmin = std::min(jmin, (Mat2::Identity() + gu).determinant());
        }
    }
    return jmin;
  }
  throw InvalidInput("min_jacobian: unsupported discretization");
}

}  // namespace vemhyper
