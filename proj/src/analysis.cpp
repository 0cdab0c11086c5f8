#include "vemhyper/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace vemhyper {

std::string to_string(Benchmark b) {
  switch (b) {
    case Benchmark::SimpleShear: return "simple-shear";
    case Benchmark::Cook: return "cook";
    case Benchmark::Punch: return "punch";
  }
  return "unknown";
}

Benchmark benchmark_from_string(const std::string& name) {
  if (name == "simple-shear" || name == "shear") return Benchmark::SimpleShear;
  if (name == "cook") return Benchmark::Cook;
  if (name == "punch") return Benchmark::Punch;
  throw InvalidInput("unknown problem '" + name + "'");
}

Domain benchmark_domain(Benchmark b) {
  switch (b) {
    case Benchmark::SimpleShear: return Domain::unit_square();
    case Benchmark::Cook: return Domain::tapered({Vec2(0, 0), Vec2(48, 44), Vec2(48, 60), Vec2(0, 44)});
    case Benchmark::Punch: return Domain::rectangle(2.0, 1.0);
  }
  throw InvalidInput("unknown benchmark");
}

Vec2 benchmark_probe_point(Benchmark b) {
  switch (b) {
    case Benchmark::SimpleShear: return Vec2(1, 1);
    case Benchmark::Cook: return Vec2(48, 60);
    case Benchmark::Punch: return Vec2(0, 1);
  }
  throw InvalidInput("unknown benchmark");
}

int benchmark_probe_component(Benchmark b) { return b == Benchmark::SimpleShear ? 0 : 1; }

double benchmark_default_load(Benchmark b) {
  switch (b) {
    case Benchmark::SimpleShear: return 5.0;
    case Benchmark::Cook: return 10.0;
    case Benchmark::Punch: return 200.0;
  }
  return 0.0;
}

namespace {

std::set<int> nodes_with_tag(const std::vector<BoundarySegment>& segments, int tag) {
  std::set<int> out;
  for (const auto& s : segments)
    if (s.tag == tag) out.insert(s.nodes.begin(), s.nodes.end());
  return out;
}

void fix(std::map<std::pair<int, int>, double>& constraints, const std::set<int>& nodes, int component) {
  for (int n : nodes) constraints[{n, component}] = 0.0;
}

}  // namespace

ProblemSetup make_benchmark_setup(const BenchmarkSpec& spec, std::shared_ptr<const Discretization> disc) {
  ProblemSetup setup;
  setup.disc = std::move(disc);
  setup.steps = spec.steps;
  setup.adaptive = spec.adaptive;
  setup.newton = spec.newton;
  const auto segments = setup.disc->boundary_segments();
  const auto& x = setup.disc->nodes();
  std::map<std::pair<int, int>, double> constraints;
  switch (spec.kind) {
    case Benchmark::SimpleShear: {
      const auto bottom = nodes_with_tag(segments, kBottom);
      fix(constraints, bottom, 0);
      fix(constraints, bottom, 1);
      for (const auto& s : segments)
        if (s.tag == kTop) setup.loads.push_back({s, Vec2(spec.load, 0.0)});
      break;
    }
    case Benchmark::Cook: {
      const auto left = nodes_with_tag(segments, kLeft);
      fix(constraints, left, 0);
      fix(constraints, left, 1);
      const auto corners = benchmark_domain(Benchmark::Cook).corners();
      const double edge = (corners[2] - corners[1]).norm();
      for (const auto& s : segments)
        if (s.tag == kRight) setup.loads.push_back({s, Vec2(0.0, spec.load / edge)});
      break;
    }
    case Benchmark::Punch: {
      fix(constraints, nodes_with_tag(segments, kBottom), 1);
      fix(constraints, nodes_with_tag(segments, kLeft), 0);
      fix(constraints, nodes_with_tag(segments, kTop), 0);
      for (const auto& s : segments) {
        if (s.tag != kTop) continue;
        const bool loaded = std::all_of(s.nodes.begin(), s.nodes.end(), [&](int n) { return x[n].x() <= 1.0 + 1e-9; });
        if (loaded) setup.loads.push_back({s, Vec2(0.0, -spec.load)});
      }
      break;
    }
  }
  for (const auto& [key, value] : constraints) setup.dirichlet.push_back({key.first, key.second, value});
  setup.validate();
  return setup;
}

ProblemSetup make_patch_setup(std::shared_ptr<const Discretization> disc, const Mat2& A, const Vec2& c, int steps) {
  ProblemSetup setup;
  setup.disc = std::move(disc);
  setup.steps = steps;
  std::set<int> boundary;
  for (const auto& s : setup.disc->boundary_segments()) boundary.insert(s.nodes.begin(), s.nodes.end());
  const auto& x = setup.disc->nodes();
  for (int n : boundary) {
    const Vec2 u = A * x[n] + c;
    setup.dirichlet.push_back({n, 0, u.x()});
    setup.dirichlet.push_back({n, 1, u.y()});
  }
  setup.validate();
  return setup;
}

Vec2 probe(const std::vector<Vec2>& nodes, const VecX& displacement, const Vec2& point, double tol) {
  double scale = 1.0;
  for (const auto& v : nodes) scale = std::max(scale, v.norm());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if ((nodes[i] - point).norm() <= tol * scale) return displacement.segment<2>(2 * i);
  throw InvalidInput("probe point is not a mesh vertex");
}

double h1_error(const VemDiscretization& disc, const VecX& displacement, const ReferenceField& reference) {
  const PolygonalMesh& mesh = disc.mesh();
  std::vector<std::pair<Vec2, Mat2>> at_vertex;
  at_vertex.reserve(mesh.num_vertices());
  for (const auto& v : mesh.vertices) at_vertex.push_back(reference(v));
  double total = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.elements[e];
    const auto& ops = disc.operators(e);
    VecX d(2 * el.size());
    for (std::size_t k = 0; k < el.size(); ++k) d.segment<2>(2 * k) = displacement.segment<2>(2 * el[k]);
    const Mat2 pi = projected_gradient(ops, d);
    const double weight = ops.area / static_cast<double>(el.size());
    double sum = 0.0;
    for (int v : el) {
      const auto& [u_ref, g_ref] = at_vertex[v];
      sum += (u_ref - displacement.segment<2>(2 * v)).squaredNorm() + (g_ref - pi).squaredNorm();
    }
    total += weight * sum;
  }
  return std::sqrt(total);
}

double h1_error(const VemDiscretization& disc, const VecX& displacement, const Q2Solution& reference) {
  return h1_error(disc, displacement, [&](const Vec2& X) { return evaluate_reference(reference, X); });
}

std::string reference_key(const BenchmarkSpec& spec, int level) {
  std::ostringstream os;
  os << std::setprecision(17) << "problem=" << to_string(spec.kind) << " model=" << to_string(spec.model.kind)
     << " E=" << spec.model.youngs << " nu=" << spec.model.poisson << " load=" << spec.load << " level=" << level;
  if (spec.model.kind == MaterialKind::MooneyRivlin) os << " r=" << spec.model.mr_ratio;
  if (spec.model.kind == MaterialKind::Ogden) {
    os << " alphas=";
    for (double a : spec.model.ogden_alphas) os << a << ',';
    os << " fractions=";
    for (double f : spec.model.ogden_mu_fractions) os << f << ',';
  }
  return os.str();
}

Q2Solution solve_reference(const BenchmarkSpec& spec, int level, const std::string& cache_dir) {
  Q2Solution solution{Q2Mesh(level, benchmark_domain(spec.kind)), {}};
  const std::string key = reference_key(spec, level);
  std::filesystem::path file;
  if (!cache_dir.empty()) {
    std::size_t hash = std::hash<std::string>{}(key);
    std::ostringstream name;
    name << "q2ref_" << to_string(spec.kind) << '_' << std::hex << hash << ".txt";
    file = std::filesystem::path(cache_dir) / name.str();
    std::ifstream in(file);
    if (in && read_reference(in, key, solution)) return solution;
  }
  auto disc = std::make_shared<Q2Discretization>(solution.mesh, spec.model);
  const ProblemSetup setup = make_benchmark_setup(spec, disc);
  const SolutionState state = solve_with_stepping(setup);
  if (!state.converged) throw std::runtime_error("reference solve did not converge for " + key);
  solution.displacement = state.displacement;
  if (!file.empty()) {
    std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file);
    write_reference(out, key, solution);
  }
  return solution;
}

ConvergenceRecord run_case(const BenchmarkSpec& spec, MeshFamily family, int level, const MeshOptions& mesh_options,
                           const Q2Solution* reference) {
  ConvergenceRecord rec;
  rec.family = family;
  rec.level = level;
  rec.nu = spec.model.poisson;
  rec.model = spec.model.kind;
  rec.alpha_on = spec.stab.alpha_on;
  const auto start = std::chrono::steady_clock::now();
  try {
    PolygonalMesh mesh = generate(family, level, benchmark_domain(spec.kind), mesh_options);
    rec.hbar = mean_diameter(mesh);
    auto disc = std::make_shared<VemDiscretization>(std::move(mesh), spec.model, spec.stab);
    const ProblemSetup setup = make_benchmark_setup(spec, disc);
    const SolutionState state = solve_with_stepping(setup);
    rec.newton_iters_total = state.total_iterations();
    rec.converged = state.converged;
    if (state.converged) {
      rec.probe = probe(disc->nodes(), state.displacement, benchmark_probe_point(spec.kind));
      if (reference) rec.h1_error = h1_error(*disc, state.displacement, *reference);
    } else {
      rec.failure = state.history.empty() ? "solver failure" : state.history.back().failure;
    }
  } catch (const std::exception& e) {
    rec.converged = false;
    rec.failure = e.what();
  }
  rec.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::optional<double> fit_slope(const std::vector<double>& hbar, const std::vector<double>& error) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < hbar.size() && i < error.size(); ++i)
    if (hbar[i] > 0 && error[i] > 0 && std::isfinite(error[i])) pts.emplace_back(std::log(hbar[i]), std::log(error[i]));
  if (pts.size() < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= pts.size();
  my /= pts.size();
  double sxy = 0, sxx = 0;
  for (const auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  if (sxx <= 0) return std::nullopt;
  return sxy / sxx;
}

StudyResult convergence_study(const StudyOptions& options) {
  if (options.families.empty() || options.levels.empty() || options.nus.empty() || options.alpha_modes.empty())
    throw InvalidInput("study sweep lists must be non-empty");

  std::map<double, Q2Solution> references;
  if (options.reference_level > 0)
    for (double nu : options.nus) {
      BenchmarkSpec spec = options.base;
      spec.model.poisson = nu;
      spec.model.validate();
      references.emplace(nu, solve_reference(spec, options.reference_level, options.reference_cache_dir));
    }

  struct Job {
    BenchmarkSpec spec;
    MeshFamily family;
    int level;
  };
  std::vector<Job> jobs;
  for (bool alpha : options.alpha_modes)
    for (double nu : options.nus)
      for (MeshFamily family : options.families)
        for (int level : options.levels) {
          Job job{options.base, family, level};
          job.spec.model.poisson = nu;
          job.spec.stab.alpha_on = alpha;
          jobs.push_back(job);
        }

  StudyResult result;
  result.records.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const auto& job = jobs[i];
      const auto ref = references.find(job.spec.model.poisson);
      result.records[i] = run_case(job.spec, job.family, job.level, options.mesh,
                                   ref == references.end() ? nullptr : &ref->second);
    }
  };
  int workers = options.workers > 0 ? options.workers : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, static_cast<int>(jobs.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (bool alpha : options.alpha_modes)
    for (double nu : options.nus)
      for (MeshFamily family : options.families) {
        std::vector<double> h, err;
        for (const auto& r : result.records)
          if (r.alpha_on == alpha && r.nu == nu && r.family == family && r.converged) {
            h.push_back(r.hbar);
            err.push_back(r.h1_error);
          }
        SlopeFit fit;
        fit.family = family;
        fit.nu = nu;
        fit.alpha_on = alpha;
        fit.slope = fit_slope(h, err);
        fit.points = static_cast<int>(std::count_if(err.begin(), err.end(), [](double e) { return std::isfinite(e); }));
        result.slopes.push_back(fit);
      }
  return result;
}

namespace {

// Shortest text that reads back to the same double.
std::string num(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

}  // namespace

void write_study_csv(std::ostream& os, const StudyResult& result) {
  os << "family,N,hbar,nu,model,alpha_mode,probe_ux,probe_uy,h1_error,newton_iters_total,runtime_s\n";
  for (const auto& r : result.records) {
    os << to_string(r.family) << ',' << r.level << ',' << num(r.hbar) << ',' << num(r.nu) << ',' << to_string(r.model)
       << ',' << (r.alpha_on ? "on" : "off") << ',' << num(r.probe.x()) << ',' << num(r.probe.y()) << ','
       << num(r.h1_error) << ',' << r.newton_iters_total << ',' << num(r.runtime_s) << '\n';
  }
  for (const auto& s : result.slopes) {
    os << "# slope family=" << to_string(s.family) << " nu=" << num(s.nu) << " alpha=" << (s.alpha_on ? "on" : "off")
       << " points=" << s.points << " value=" << (s.slope ? num(*s.slope) : std::string("absent")) << '\n';
  }
  for (const auto& r : result.records)
    if (!r.converged)
      os << "# failed family=" << to_string(r.family) << " N=" << r.level << " nu=" << num(r.nu)
         << " alpha=" << (r.alpha_on ? "on" : "off") << " reason=" << r.failure << '\n';
}

}  // namespace vemhyper
