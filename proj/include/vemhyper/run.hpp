#pragma once

#include "vemhyper/config.hpp"
#include "vemhyper/solver.hpp"

#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace vemhyper {

struct RunOutcome {
  std::shared_ptr<const VemDiscretization> disc;
  ProblemSetup setup;
  SolutionState state;
  Vec2 probe = Vec2::Zero();
  bool has_probe = false;
  double min_jacobian = 0.0;
  double runtime_s = 0.0;
};

/// Builds the mesh and boundary data described by `config` without solving.
ProblemSetup build_problem(const RunConfig& config);

RunOutcome execute_run(const RunConfig& config);

/// node,x,y,ux,uy
void write_solution_csv(std::ostream& os, const PolygonalMesh& mesh, const VecX& displacement);
/// Legacy ASCII POLYDATA with displaced points and one polygon per element.
void write_vtk(std::ostream& os, const PolygonalMesh& mesh, const VecX& displacement, const std::string& title,
               const std::vector<std::pair<std::string, std::string>>& metadata = {});

nlohmann::json config_json(const RunConfig& config);
nlohmann::json history_json(const SolutionState& state);
nlohmann::json run_json(const RunConfig& config, const RunOutcome& outcome);

}  // namespace vemhyper
