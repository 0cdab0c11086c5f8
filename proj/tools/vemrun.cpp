#include "vemhyper/config.hpp"
#include "vemhyper/run.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

namespace fs = std::filesystem;
using namespace vemhyper;

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kSolverFailure = 3, kIoError = 4 };

struct Overrides {
  std::string out_dir;
  long long seed = -1;
};

RunConfig load_with_overrides(const std::string& path, const Overrides& o) {
  RunConfig config = load_config(path);
  if (!o.out_dir.empty()) config.output_dir = o.out_dir;
  if (o.seed >= 0) config.mesh.seed = static_cast<std::uint64_t>(o.seed);
  config.validate();
  return config;
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  if (!fs::is_directory(p)) throw std::ios_base::failure("output directory '" + dir + "' is not a directory");
  return p;
}

std::ofstream open_out(const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw std::ios_base::failure("cannot write '" + file.string() + "'");
  out.exceptions(std::ios::badbit | std::ios::failbit);
  return out;
}

void print_history(std::ostream& os, const SolutionState& state) {
  for (const auto& s : state.history) {
    os << "  step lambda=" << s.load_factor << " iterations=" << s.iterations
       << (s.converged ? " converged" : " failed");
    if (!s.failure.empty()) os << " (" << s.failure << ")";
    os << '\n';
  }
}

int cmd_run(const std::string& path, const Overrides& o) {
  const RunConfig config = load_with_overrides(path, o);
  const RunOutcome outcome = execute_run(config);
  const fs::path dir = prepare_dir(config.output_dir);
  const nlohmann::json meta = run_json(config, outcome);
  open_out(dir / "run.json") << meta.dump(2) << '\n';
  if (!outcome.state.converged) {
    std::cerr << "vemrun: solver failed\n";
    print_history(std::cerr, outcome.state);
    return kSolverFailure;
  }
  const auto& mesh = outcome.disc->mesh();
  {
    auto out = open_out(dir / "solution.csv");
    write_solution_csv(out, mesh, outcome.state.displacement);
    for (const auto& [k, v] : effective_config(config)) out << "# " << k << " = " << v << '\n';
  }
  {
    auto out = open_out(dir / "deformed.vtk");
    write_vtk(out, mesh, outcome.state.displacement,
              "vemhyper " + config.problem + " " + to_string(config.family) + " N=" + std::to_string(config.level),
              effective_config(config));
  }
  std::cout << "converged in " << outcome.state.total_iterations() << " Newton iterations, "
            << outcome.state.history.size() << " steps\n";
  if (outcome.has_probe)
    std::cout << "probe u = (" << outcome.probe.x() << ", " << outcome.probe.y() << ")\n";
  std::cout << "wrote " << (dir / "solution.csv").string() << ", " << (dir / "deformed.vtk").string() << ", "
            << (dir / "run.json").string() << '\n';
  return kOk;
}

int cmd_study(const std::string& path, const Overrides& o) {
  const RunConfig config = load_with_overrides(path, o);
  const StudyOptions options = study_options(config);
  const StudyResult result = convergence_study(options);
  const fs::path dir = prepare_dir(config.output_dir);
  {
    auto out = open_out(dir / "study.csv");
    write_study_csv(out, result);
    for (const auto& [k, v] : effective_config(config)) out << "# config " << k << " = " << v << '\n';
  }
  int failed = 0;
  for (const auto& r : result.records) failed += r.converged ? 0 : 1;
  for (const auto& s : result.slopes) {
    std::cout << to_string(s.family) << " nu=" << s.nu << " alpha=" << (s.alpha_on ? "on" : "off") << " slope=";
    if (s.slope)
      std::cout << *s.slope << '\n';
    else
      std::cout << "absent\n";
  }
  std::cout << "wrote " << (dir / "study.csv").string() << '\n';
  if (failed) {
    std::cerr << "vemrun: " << failed << " of " << result.records.size() << " runs failed\n";
    return kSolverFailure;
  }
  return kOk;
}

int cmd_mesh(const std::string& family, int level, const std::string& domain, const std::string& output,
             const Overrides& o, const MeshOptions& base) {
  MeshOptions options = base;
  if (o.seed >= 0) options.seed = static_cast<std::uint64_t>(o.seed);
  const MeshFamily f = mesh_family_from_string(family);
  if (level < 1 || level > 10) throw ConfigError("N must be in 1..10");
  const PolygonalMesh mesh = generate(f, level, parse_domain(domain), options);
  fs::path file(output);
  if (!o.out_dir.empty() && file.is_relative()) file = prepare_dir(o.out_dir) / file;
  auto out = open_out(file);
  write_vpoly(out, mesh);
  std::cout << "wrote " << file.string() << ": " << mesh.num_vertices() << " vertices, " << mesh.num_elements()
            << " elements\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Virtual element solver for plane-strain hyperelasticity"};
  app.require_subcommand(1);
  Overrides o;

  std::string run_config, study_config;
  auto* run = app.add_subcommand("run", "Solve one problem and write solution.csv, deformed.vtk and run.json");
  run->add_option("config", run_config, "Configuration file")->required();
  auto* study = app.add_subcommand("study", "Run a convergence study and write study.csv");
  study->add_option("config", study_config, "Configuration file")->required();

  std::string family, domain = "unit", output;
  int level = 0;
  MeshOptions mesh_options;
  auto* mesh = app.add_subcommand("mesh", "Generate a mesh in VPOLY format");
  mesh->add_option("family", family, "sq1 | dq2s | ss | iss | vrn")->required();
  mesh->add_option("N", level, "Refinement level")->required();
  mesh->add_option("--domain", domain, "unit | cook | punch | rect:W,H | quad:x0,y0,...,x3,y3");
  mesh->add_option("-o,--output", output, "Output file")->required();
  mesh->add_option("--distortion", mesh_options.distortion, "DQ2S corner perturbation");
  mesh->add_option("--lloyd-iters", mesh_options.lloyd_iters, "Voronoi relaxation sweeps");

  for (auto* sub : {run, study, mesh}) {
    sub->add_option("--seed", o.seed, "Mesh random seed")->check(CLI::NonNegativeNumber);
    sub->add_option("--out-dir", o.out_dir, "Output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(run_config, o);
    if (*study) return cmd_study(study_config, o);
    if (*mesh) return cmd_mesh(family, level, domain, output, o, mesh_options);
  } catch (const ConfigError& e) {
    std::cerr << "vemrun: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "vemrun: io error: " << e.what() << '\n';
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "vemrun: io error: " << e.what() << '\n';
    return kIoError;
  } catch (const InvalidInput& e) {
    std::cerr << "vemrun: invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "vemrun: solver failure: " << e.what() << '\n';
    return kSolverFailure;
  }
  return kConfigError;
}
