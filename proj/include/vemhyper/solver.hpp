#pragma once

#include "vemhyper/material.hpp"
#include "vemhyper/mesh.hpp"
#include "vemhyper/q2.hpp"
#include "vemhyper/stabilization.hpp"
#include "vemhyper/types.hpp"
#include "vemhyper/vem_element.hpp"

#include <Eigen/SparseCore>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace vemhyper {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// A boundary segment: 2 nodes (linear trace) or 3 nodes (quadratic trace,
/// midpoint node in the middle), oriented with the domain counter-clockwise.
struct BoundarySegment {
  std::vector<int> nodes;
  int tag = 0;
};

struct ElementContribution {
  double energy = 0.0;
  VecX residual;
  MatX tangent;
};

/// What the nonlinear solver needs from a spatial discretization.
class Discretization {
 public:
  virtual ~Discretization() = default;
  virtual std::size_t num_nodes() const = 0;
  virtual const std::vector<Vec2>& nodes() const = 0;
  virtual std::size_t num_elements() const = 0;
  virtual std::vector<int> element_nodes(std::size_t e) const = 0;
  /// Throws NonFiniteState for inadmissible states.
  virtual ElementContribution element(std::size_t e, const VecX& d, Need need) const = 0;
  virtual std::vector<BoundarySegment> boundary_segments() const = 0;
  /// Consistent nodal forces of a constant body force (per unit area).
  virtual VecX body_force_vector(const Vec2& force) const = 0;
  virtual std::string name() const = 0;
};

/// Lowest-order virtual elements on a polygonal mesh. Element operators and
/// stabilization parameters are fixed at construction (reference geometry).
class VemDiscretization final : public Discretization {
 public:
  VemDiscretization(PolygonalMesh mesh, MaterialModel model, StabilizationConfig stab = {});

  std::size_t num_nodes() const override { return mesh_.num_vertices(); }
  const std::vector<Vec2>& nodes() const override { return mesh_.vertices; }
  std::size_t num_elements() const override { return mesh_.num_elements(); }
  std::vector<int> element_nodes(std::size_t e) const override { return mesh_.elements[e]; }
  ElementContribution element(std::size_t e, const VecX& d, Need need) const override;
  std::vector<BoundarySegment> boundary_segments() const override;
  /// f . (|E| / n_v) summed over each element's vertices.
  VecX body_force_vector(const Vec2& force) const override;
  std::string name() const override { return "vem"; }

  const PolygonalMesh& mesh() const { return mesh_; }
  const MaterialModel& model() const { return model_; }
  const StabilizationConfig& stab_config() const { return stab_; }
  const ElementOperators& operators(std::size_t e) const { return ops_[e]; }

 private:
  PolygonalMesh mesh_;
  MaterialModel model_;
  StabilizationConfig stab_;
  std::vector<ElementOperators> ops_;
};

class Q2Discretization final : public Discretization {
 public:
  Q2Discretization(Q2Mesh mesh, MaterialModel model);

  std::size_t num_nodes() const override { return mesh_.num_nodes(); }
  const std::vector<Vec2>& nodes() const override { return mesh_.nodes(); }
  std::size_t num_elements() const override { return mesh_.num_cells(); }
  std::vector<int> element_nodes(std::size_t e) const override;
  ElementContribution element(std::size_t e, const VecX& d, Need need) const override;
  std::vector<BoundarySegment> boundary_segments() const override;
  VecX body_force_vector(const Vec2& force) const override;
  std::string name() const override { return "q2"; }

  const Q2Mesh& mesh() const { return mesh_; }

 private:
  Q2Mesh mesh_;
  MaterialModel model_;
};

struct DirichletCondition {
  int node = 0;
  int component = 0;  // 0 = x, 1 = y
  double value = 0.0; // at full load, metres
};

/// Dead traction (reference configuration) on one boundary segment, N/m.
struct SegmentLoad {
  BoundarySegment segment;
  Vec2 traction = Vec2::Zero();
};

struct NewtonSettings {
  double tol_rel = 1e-10;
  double tol_abs = 1e-12;
  int max_iter = 25;
};

struct ProblemSetup {
  std::shared_ptr<const Discretization> disc;
  std::vector<DirichletCondition> dirichlet;
  std::vector<SegmentLoad> loads;
  Vec2 body_force = Vec2::Zero();
  int steps = 5;
  bool adaptive = true;
  NewtonSettings newton{};

  /// Throws InvalidInput when the setup is unusable (no Dirichlet data,
  /// duplicate constraints, out-of-range nodes).
  void validate() const;
};

struct StepRecord {
  double load_factor = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string failure;
  std::vector<double> residual_norms;
  double energy_start = 0.0;  // total potential energy at the step's initial guess
  double energy_end = 0.0;
};

struct SolutionState {
  VecX displacement;  // 2 * num_nodes
  double load_factor = 0.0;
  bool converged = false;
  std::vector<StepRecord> history;

  int total_iterations() const;
};

/// Consistent nodal forces of tractions and body force at full load.
VecX external_force(const ProblemSetup& setup);

struct Assembly {
  VecX residual;  // internal minus external force, all DOFs
  SparseMatrix tangent;
  double energy = 0.0;  // total potential energy
};

/// Residual R = f_int(u) - load_factor f_ext and the full sparse tangent.
/// Throws NonFiniteState if any element is inadmissible.
Assembly assemble(const ProblemSetup& setup, const VecX& displacement, double load_factor = 1.0,
                  bool want_tangent = true);

double total_potential_energy(const ProblemSetup& setup, const VecX& displacement, double load_factor);

/// Full Newton on the free DOFs at the given load factor, starting from
/// `state`. Dirichlet values are set to load_factor times their targets.
SolutionState newton_solve(const ProblemSetup& setup, const SolutionState& state, double load_factor);

/// Incremental loading from the zero state to load factor 1. With
/// `setup.adaptive`, a failed increment is halved (at most 10 times) and the
/// increment is grown back after successes.
SolutionState solve_with_stepping(const ProblemSetup& setup);

/// Internal forces at constrained DOFs, summed per component.
Vec2 reaction_resultant(const ProblemSetup& setup, const SolutionState& state);

/// Smallest J over the projections and subtriangles (VEM) or quadrature
/// points (Q2) of the current state.
double min_jacobian(const Discretization& disc, const VecX& displacement);

}  // namespace vemhyper
