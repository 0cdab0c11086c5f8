#include "vemhyper/run.hpp"

#include <cctype>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <set>

namespace vemhyper {

ProblemSetup build_problem(const RunConfig& config) {
  config.validate();
  if (config.is_benchmark()) {
    const BenchmarkSpec spec = benchmark_spec(config);
    PolygonalMesh mesh = generate(config.family, config.level, benchmark_domain(spec.kind), config.mesh);
    auto disc = std::make_shared<VemDiscretization>(std::move(mesh), config.model, config.stab);
    ProblemSetup setup = make_benchmark_setup(spec, disc);
    setup.body_force = config.body_force;
    return setup;
  }

  std::ifstream in(config.mesh_file);
  if (!in) throw std::ios_base::failure("cannot open mesh file '" + config.mesh_file + "'");
  PolygonalMesh mesh = read_vpoly(in);
  auto disc = std::make_shared<VemDiscretization>(std::move(mesh), config.model, config.stab);
  ProblemSetup setup;
  setup.disc = disc;
  setup.steps = config.steps;
  setup.adaptive = config.adaptive;
  setup.newton = config.newton;
  setup.body_force = config.body_force;
  const auto segments = disc->boundary_segments();
  std::map<std::pair<int, int>, double> fixed;
  for (const auto& [tag, side] : config.sides) {
    std::set<int> nodes;
    for (const auto& s : segments)
      if (s.tag == tag) nodes.insert(s.nodes.begin(), s.nodes.end());
    if (nodes.empty()) throw ConfigError("mesh has no boundary edges with tag " + std::to_string(tag));
    for (int n : nodes) {
      if (side.ux) fixed[{n, 0}] = *side.ux;
      if (side.uy) fixed[{n, 1}] = *side.uy;
    }
    if (side.has_traction)
      for (const auto& s : segments)
        if (s.tag == tag) setup.loads.push_back({s, side.traction});
  }
  for (const auto& [key, value] : fixed) setup.dirichlet.push_back({key.first, key.second, value});
  setup.validate();
  return setup;
}

RunOutcome execute_run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome out;
  out.setup = build_problem(config);
  out.disc = std::static_pointer_cast<const VemDiscretization>(out.setup.disc);
  out.state = solve_with_stepping(out.setup);
  if (out.state.converged) {
    out.min_jacobian = min_jacobian(*out.disc, out.state.displacement);
    if (config.is_benchmark()) {
      out.probe = probe(out.disc->nodes(), out.state.displacement, benchmark_probe_point(config.benchmark()));
      out.has_probe = true;
    }
  }
  out.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void write_solution_csv(std::ostream& os, const PolygonalMesh& mesh, const VecX& u) {
  os << "node,x,y,ux,uy\n" << std::setprecision(17);
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i)
    os << i << ',' << mesh.vertices[i].x() << ',' << mesh.vertices[i].y() << ',' << u(2 * i) << ',' << u(2 * i + 1)
       << '\n';
}

void write_vtk(std::ostream& os, const PolygonalMesh& mesh, const VecX& u, const std::string& title,
               const std::vector<std::pair<std::string, std::string>>& metadata) {
  std::string header = title.substr(0, 255);
  for (char& ch : header)
    if (ch == '\n') ch = ' ';
  os << "# vtk DataFile Version 3.0\n" << header << "\nASCII\nDATASET POLYDATA\n";
  if (!metadata.empty()) {
    // Dataset-level string array, one key=value token per tuple.
    os << "FIELD FieldData 1\nconfig 1 " << metadata.size() << " string\n";
    for (const auto& [k, v] : metadata) {
      std::string line = k + "=" + v;
      for (char& ch : line)
        if (std::isspace(static_cast<unsigned char>(ch))) ch = '_';
      os << line << '\n';
    }
  }
  os << std::setprecision(17);
  os << "POINTS " << mesh.num_vertices() << " double\n";
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i)
    os << mesh.vertices[i].x() + u(2 * i) << ' ' << mesh.vertices[i].y() + u(2 * i + 1) << " 0\n";
  std::size_t size = 0;
  for (const auto& el : mesh.elements) size += el.size() + 1;
  os << "POLYGONS " << mesh.num_elements() << ' ' << size << '\n';
  for (const auto& el : mesh.elements) {
    os << el.size();
    for (int v : el) os << ' ' << v;
    os << '\n';
  }
  os << "POINT_DATA " << mesh.num_vertices() << "\nVECTORS displacement double\n";
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) os << u(2 * i) << ' ' << u(2 * i + 1) << " 0\n";
}

nlohmann::json config_json(const RunConfig& config) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : effective_config(config)) j[k] = v;
  return j;
}

nlohmann::json history_json(const SolutionState& state) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : state.history) {
    nlohmann::json r = {{"load_factor", s.load_factor},
                        {"iterations", s.iterations},
                        {"converged", s.converged},
                        {"residual_norms", s.residual_norms}};
    if (!s.failure.empty()) r["failure"] = s.failure;
    if (s.converged) {
      r["energy_start"] = s.energy_start;
      r["energy_end"] = s.energy_end;
    }
    steps.push_back(std::move(r));
  }
  return steps;
}

nlohmann::json run_json(const RunConfig& config, const RunOutcome& outcome) {
  const auto& mesh = outcome.disc->mesh();
  nlohmann::json j;
  j["config"] = config_json(config);
  j["mesh"] = {{"vertices", mesh.num_vertices()},
               {"elements", mesh.num_elements()},
               {"hbar", mean_diameter(mesh)},
               {"domain", mesh.domain.describe()}};
  j["converged"] = outcome.state.converged;
  j["load_factor"] = outcome.state.load_factor;
  j["newton_iters_total"] = outcome.state.total_iterations();
  j["runtime_s"] = outcome.runtime_s;
  if (outcome.state.converged) j["min_jacobian"] = outcome.min_jacobian;
  if (outcome.has_probe) {
    j["probe"] = {{"point", {benchmark_probe_point(config.benchmark()).x(), benchmark_probe_point(config.benchmark()).y()}},
                  {"ux", outcome.probe.x()},
                  {"uy", outcome.probe.y()}};
  }
  j["history"] = history_json(outcome.state);
  return j;
}

}  // namespace vemhyper
