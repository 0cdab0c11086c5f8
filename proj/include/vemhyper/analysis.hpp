#pragma once

#include "vemhyper/material.hpp"
#include "vemhyper/mesh.hpp"
#include "vemhyper/q2.hpp"
#include "vemhyper/solver.hpp"
#include "vemhyper/stabilization.hpp"

#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vemhyper {

enum class Benchmark { SimpleShear, Cook, Punch };

std::string to_string(Benchmark b);
Benchmark benchmark_from_string(const std::string& name);

/// Reference geometry of each benchmark: unit square (simple shear), the
/// tapered Cook panel with corners (0,0) (48,44) (48,60) (0,44), and a 2x1
/// rectangle (punch).
Domain benchmark_domain(Benchmark b);
/// Corner whose displacement is reported: top-right (shear, Cook) or
/// top-left (punch).
Vec2 benchmark_probe_point(Benchmark b);
/// Probe component: 0 for shear, 1 for Cook and punch.
int benchmark_probe_component(Benchmark b);
/// Default load magnitude: q_s = 5 N/m, Q_c = 10 N, q_p = 200 N/m.
double benchmark_default_load(Benchmark b);

struct BenchmarkSpec {
  Benchmark kind = Benchmark::SimpleShear;
  MaterialModel model{};
  StabilizationConfig stab{};
  double load = 5.0;
  int steps = 5;
  bool adaptive = true;
  NewtonSettings newton{};
};

/// Boundary conditions and loads of a benchmark on any discretization:
///  - shear: bottom clamped, horizontal traction `load` on the top;
///  - Cook: left clamped, vertical traction load / 16 on the right edge;
///  - punch: u_y = 0 on the bottom, u_x = 0 on the left and top, downward
///    traction `load` on the top for x <= 1.
ProblemSetup make_benchmark_setup(const BenchmarkSpec& spec, std::shared_ptr<const Discretization> disc);

/// Affine Dirichlet data u = A X + c on every boundary node.
ProblemSetup make_patch_setup(std::shared_ptr<const Discretization> disc, const Mat2& A, const Vec2& c,
                              int steps = 1);

/// Displacement of the mesh vertex at `point`. Throws InvalidInput if no
/// vertex lies there.
Vec2 probe(const std::vector<Vec2>& nodes, const VecX& displacement, const Vec2& point, double tol = 1e-9);

/// Reference displacement and gradient at a point.
using ReferenceField = std::function<std::pair<Vec2, Mat2>(const Vec2&)>;

/// The H1-like discrete error: for each element, each vertex X_j
/// contributes (|u_ref(X_j) - u_h(X_j)|^2 + |grad u_ref(X_j) - Pi u_h|_F^2)
/// weighted by |E| / n_v; the square root of the sum is returned.
double h1_error(const VemDiscretization& disc, const VecX& displacement, const ReferenceField& reference);
double h1_error(const VemDiscretization& disc, const VecX& displacement, const Q2Solution& reference);

/// Solves a benchmark on a Q2 mesh of the given level, reading and writing
/// the plain-text cache in `cache_dir` when it is non-empty.
Q2Solution solve_reference(const BenchmarkSpec& spec, int level, const std::string& cache_dir = "");
std::string reference_key(const BenchmarkSpec& spec, int level);

struct ConvergenceRecord {
  MeshFamily family = MeshFamily::SQ1;
  int level = 0;
  double hbar = 0.0;
  double nu = 0.0;
  MaterialKind model = MaterialKind::NeoHookean;
  bool alpha_on = true;
  Vec2 probe = Vec2::Constant(std::numeric_limits<double>::quiet_NaN());
  double h1_error = std::numeric_limits<double>::quiet_NaN();
  int newton_iters_total = 0;
  double runtime_s = 0.0;
  bool converged = false;
  std::string failure;
};

struct SlopeFit {
  MeshFamily family = MeshFamily::SQ1;
  double nu = 0.0;
  bool alpha_on = true;
  /// Least-squares slope of log(error) against log(hbar); empty with fewer
  /// than two usable points.
  std::optional<double> slope;
  int points = 0;
};

struct StudyOptions {
  BenchmarkSpec base{};
  std::vector<MeshFamily> families{MeshFamily::DQ2S};
  std::vector<int> levels{2, 3, 4, 5};
  std::vector<double> nus{0.3};
  std::vector<bool> alpha_modes{true};
  MeshOptions mesh{};
  /// Q2 reference level for the H1 error; 0 skips the error.
  int reference_level = 6;
  std::string reference_cache_dir;
  /// Worker threads for independent runs; 0 picks hardware concurrency.
  int workers = 0;
};

struct StudyResult {
  std::vector<ConvergenceRecord> records;
  std::vector<SlopeFit> slopes;
};

/// Single VEM run of a benchmark; failures are reported in the record.
ConvergenceRecord run_case(const BenchmarkSpec& spec, MeshFamily family, int level, const MeshOptions& mesh,
                           const Q2Solution* reference);

StudyResult convergence_study(const StudyOptions& options);

std::optional<double> fit_slope(const std::vector<double>& hbar, const std::vector<double>& error);

void write_study_csv(std::ostream& os, const StudyResult& result);

}  // namespace vemhyper
