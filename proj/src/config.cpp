#include "vemhyper/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace vemhyper {

namespace {

const char* const kSideNames[] = {"", "bottom", "right", "top", "left"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) throw ConfigError("expected a number, got '" + v + "'");
  return out;
}

long long to_integer(const std::string& v) {
  long long out = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError("expected an integer, got '" + v + "'");
  return out;
}

int to_int(const std::string& v) {
  const long long x = to_integer(v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ConfigError("integer out of range: " + v);
  return static_cast<int>(x);
}

bool to_bool(const std::string& v) {
  if (v == "on" || v == "true" || v == "yes" || v == "1") return true;
  if (v == "off" || v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("expected on|off, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty entry in list '" + v + "'");
    out.push_back(item);
  }
  return out;
}

template <class T, class F>
std::vector<T> to_list(const std::string& v, F convert) {
  std::vector<T> out;
  for (const auto& item : split_list(v)) out.push_back(convert(item));
  return out;
}

std::string fmt(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

template <class T, class F>
std::string join(const std::vector<T>& v, F render) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += render(v[i]);
  }
  return out;
}

std::string on_off(bool b) { return b ? "on" : "off"; }

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"problem", [](RunConfig& c, const std::string& v) { c.problem = v; }},
      {"mesh.family", [](RunConfig& c, const std::string& v) { c.family = mesh_family_from_string(v); }},
      {"mesh.N", [](RunConfig& c, const std::string& v) { c.level = to_int(v); }},
      {"mesh.distortion", [](RunConfig& c, const std::string& v) { c.mesh.distortion = to_double(v); }},
      {"mesh.seed",
       [](RunConfig& c, const std::string& v) {
         const long long s = to_integer(v);
         if (s < 0) throw ConfigError("mesh.seed must be non-negative");
         c.mesh.seed = static_cast<std::uint64_t>(s);
       }},
      {"mesh.lloyd_iters", [](RunConfig& c, const std::string& v) { c.mesh.lloyd_iters = to_int(v); }},
      {"mesh.sun_arm", [](RunConfig& c, const std::string& v) { c.mesh.sun_star.arm = to_double(v); }},
      {"mesh.serration_depth", [](RunConfig& c, const std::string& v) { c.mesh.sun_star.depth = to_double(v); }},
      {"mesh.file", [](RunConfig& c, const std::string& v) { c.mesh_file = v; }},
      {"material.model", [](RunConfig& c, const std::string& v) { c.model.kind = material_kind_from_string(v); }},
      {"material.E", [](RunConfig& c, const std::string& v) { c.model.youngs = to_double(v); }},
      {"material.nu", [](RunConfig& c, const std::string& v) { c.model.poisson = to_double(v); }},
      {"material.mr_ratio", [](RunConfig& c, const std::string& v) { c.model.mr_ratio = to_double(v); }},
      {"material.ogden_alphas",
       [](RunConfig& c, const std::string& v) { c.model.ogden_alphas = to_list<double>(v, to_double); }},
      {"material.ogden_mu_fractions",
       [](RunConfig& c, const std::string& v) { c.model.ogden_mu_fractions = to_list<double>(v, to_double); }},
      {"stab.alpha", [](RunConfig& c, const std::string& v) { c.stab.alpha_on = to_bool(v); }},
      {"stab.taylor_order", [](RunConfig& c, const std::string& v) { c.stab.taylor_order = to_int(v); }},
      {"stab.nu0", [](RunConfig& c, const std::string& v) { c.stab.nu0 = to_double(v); }},
      {"stab.mvee_tol", [](RunConfig& c, const std::string& v) { c.stab.mvee_tol = to_double(v); }},
      {"steps", [](RunConfig& c, const std::string& v) { c.steps = to_int(v); }},
      {"adaptive", [](RunConfig& c, const std::string& v) { c.adaptive = to_bool(v); }},
      {"newton.tol_rel", [](RunConfig& c, const std::string& v) { c.newton.tol_rel = to_double(v); }},
      {"newton.tol_abs", [](RunConfig& c, const std::string& v) { c.newton.tol_abs = to_double(v); }},
      {"newton.max_iter", [](RunConfig& c, const std::string& v) { c.newton.max_iter = to_int(v); }},
      {"load", [](RunConfig& c, const std::string& v) { c.load = to_double(v); }},
      {"body.fx", [](RunConfig& c, const std::string& v) { c.body_force.x() = to_double(v); }},
      {"body.fy", [](RunConfig& c, const std::string& v) { c.body_force.y() = to_double(v); }},
      {"reference.level", [](RunConfig& c, const std::string& v) { c.reference_level = to_int(v); }},
      {"reference.cache_dir", [](RunConfig& c, const std::string& v) { c.reference_cache_dir = v; }},
      {"study.families",
       [](RunConfig& c, const std::string& v) { c.study_families = to_list<MeshFamily>(v, mesh_family_from_string); }},
      {"study.levels", [](RunConfig& c, const std::string& v) { c.study_levels = to_list<int>(v, to_int); }},
      {"study.nus", [](RunConfig& c, const std::string& v) { c.study_nus = to_list<double>(v, to_double); }},
      {"study.alpha", [](RunConfig& c, const std::string& v) { c.study_alpha = to_list<bool>(v, to_bool); }},
      {"study.workers", [](RunConfig& c, const std::string& v) { c.study_workers = to_int(v); }},
      {"output.dir", [](RunConfig& c, const std::string& v) { c.output_dir = v; }},
  };
  return table;
}

// bc.<side>.<ux|uy|tx|ty>
bool set_side(RunConfig& c, const std::string& key, const std::string& value) {
  if (key.rfind("bc.", 0) != 0) return false;
  const auto dot = key.find('.', 3);
  if (dot == std::string::npos) return false;
  const std::string side = key.substr(3, dot - 3), field = key.substr(dot + 1);
  int tag = 0;
  for (int t = 1; t <= 4; ++t)
    if (side == kSideNames[t]) tag = t;
  if (tag == 0) return false;
  SideCondition& s = c.sides[tag];
  if (field == "ux")
    s.ux = to_double(value);
  else if (field == "uy")
    s.uy = to_double(value);
  else if (field == "tx") {
    s.traction.x() = to_double(value);
    s.has_traction = true;
  } else if (field == "ty") {
    s.traction.y() = to_double(value);
    s.has_traction = true;
  } else
    return false;
  return true;
}

}  // namespace

Benchmark RunConfig::benchmark() const {
  if (!is_benchmark()) throw ConfigError("custom problems have no benchmark definition");
  return benchmark_from_string(problem);
}

double RunConfig::effective_load() const {
  if (load) return *load;
  return is_benchmark() ? benchmark_default_load(benchmark()) : 0.0;
}

void RunConfig::validate() const {
  try {
    if (is_benchmark()) {
      benchmark();
      if (!mesh_file.empty()) throw ConfigError("mesh.file is only used with problem = custom");
      if (!sides.empty()) throw ConfigError("bc.* keys are only used with problem = custom");
    } else {
      if (mesh_file.empty()) throw ConfigError("problem = custom requires mesh.file");
      if (load) throw ConfigError("load applies to benchmark problems; use bc.<side>.tx/ty");
      bool any_dirichlet = false;
      for (const auto& [tag, s] : sides) {
        if (s.ux || s.uy) any_dirichlet = true;
        if (s.has_traction && (s.ux || s.uy))
          throw ConfigError(std::string("side ") + kSideNames[tag] + " has both displacement and traction data");
      }
      if (!any_dirichlet) throw ConfigError("custom problems need at least one bc.<side>.ux or uy");
    }
    if (level < 1 || level > 10) throw ConfigError("mesh.N must be in 1..10");
    if (!(mesh.distortion >= 0.0 && mesh.distortion < 0.5)) throw ConfigError("mesh.distortion must be in [0, 0.5)");
    if (mesh.lloyd_iters < 0) throw ConfigError("mesh.lloyd_iters must be >= 0");
    if (!(mesh.sun_star.depth > 0.0 && 2.0 * mesh.sun_star.depth < mesh.sun_star.arm && mesh.sun_star.arm < 0.5))
      throw ConfigError("sun/star shape needs 0 < 2 * serration_depth < sun_arm < 0.5");
    model.validate();
    if (stab.taylor_order < 1) throw ConfigError("stab.taylor_order must be >= 1");
    if (!(stab.nu0 > -1.0 && stab.nu0 < 0.5)) throw ConfigError("stab.nu0 must be in (-1, 0.5)");
    if (!(stab.mvee_tol > 0.0)) throw ConfigError("stab.mvee_tol must be positive");
    if (steps < 1) throw ConfigError("steps must be >= 1");
    if (!(newton.tol_rel > 0.0) || !(newton.tol_abs >= 0.0)) throw ConfigError("newton tolerances must be positive");
    if (newton.max_iter < 1) throw ConfigError("newton.max_iter must be >= 1");
    if (reference_level < 0 || reference_level > 9) throw ConfigError("reference.level must be in 0..9");
    if (study_families.empty() || study_levels.empty() || study_nus.empty() || study_alpha.empty())
      throw ConfigError("study sweep lists must be non-empty");
    for (int n : study_levels)
      if (n < 1 || n > 10) throw ConfigError("study.levels entries must be in 1..10");
    for (double nu : study_nus)
      if (!(nu > -1.0 && nu < 0.5)) throw ConfigError("study.nus entries must be in (-1, 0.5)");
    if (study_workers < 0) throw ConfigError("study.workers must be >= 0");
    if (output_dir.empty()) throw ConfigError("output.dir must not be empty");
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
}

RunConfig parse_config(std::istream& is, const std::string& source) {
  RunConfig config;
  std::set<std::string> seen;
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "missing key");
    if (value.empty()) throw ConfigError(where + "missing value for '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      const auto it = setters().find(key);
      if (it != setters().end())
        it->second(config, value);
      else if (!set_side(config, key, value))
        throw ConfigError("unknown key '" + key + "'");
    } catch (const InvalidInput& e) {
      throw ConfigError(where + e.what());
    }
  }
  try {
    config.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

std::vector<std::pair<std::string, std::string>> effective_config(const RunConfig& c) {
  std::vector<std::pair<std::string, std::string>> kv = {
      {"problem", c.problem},
      {"mesh.family", to_string(c.family)},
      {"mesh.N", std::to_string(c.level)},
      {"mesh.distortion", fmt(c.mesh.distortion)},
      {"mesh.seed", std::to_string(c.mesh.seed)},
      {"mesh.lloyd_iters", std::to_string(c.mesh.lloyd_iters)},
      {"mesh.sun_arm", fmt(c.mesh.sun_star.arm)},
      {"mesh.serration_depth", fmt(c.mesh.sun_star.depth)},
  };
  if (!c.mesh_file.empty()) kv.emplace_back("mesh.file", c.mesh_file);
  kv.insert(kv.end(), {
                          {"material.model", to_string(c.model.kind)},
                          {"material.E", fmt(c.model.youngs)},
                          {"material.nu", fmt(c.model.poisson)},
                          {"material.mr_ratio", fmt(c.model.mr_ratio)},
                          {"material.ogden_alphas", join(c.model.ogden_alphas, fmt)},
                          {"material.ogden_mu_fractions", join(c.model.ogden_mu_fractions, fmt)},
                          {"stab.alpha", on_off(c.stab.alpha_on)},
                          {"stab.taylor_order", std::to_string(c.stab.taylor_order)},
                          {"stab.nu0", fmt(c.stab.nu0)},
                          {"stab.mvee_tol", fmt(c.stab.mvee_tol)},
                          {"steps", std::to_string(c.steps)},
                          {"adaptive", on_off(c.adaptive)},
                          {"newton.tol_rel", fmt(c.newton.tol_rel)},
                          {"newton.tol_abs", fmt(c.newton.tol_abs)},
                          {"newton.max_iter", std::to_string(c.newton.max_iter)},
                      });
  if (c.is_benchmark()) kv.emplace_back("load", fmt(c.effective_load()));
  kv.emplace_back("body.fx", fmt(c.body_force.x()));
  kv.emplace_back("body.fy", fmt(c.body_force.y()));
  for (const auto& [tag, s] : c.sides) {
    const std::string p = std::string("bc.") + kSideNames[tag] + ".";
    if (s.ux) kv.emplace_back(p + "ux", fmt(*s.ux));
    if (s.uy) kv.emplace_back(p + "uy", fmt(*s.uy));
    if (s.has_traction) {
      kv.emplace_back(p + "tx", fmt(s.traction.x()));
      kv.emplace_back(p + "ty", fmt(s.traction.y()));
    }
  }
  kv.insert(kv.end(), {
                          {"reference.level", std::to_string(c.reference_level)},
                      });
  if (!c.reference_cache_dir.empty()) kv.emplace_back("reference.cache_dir", c.reference_cache_dir);
  kv.insert(kv.end(), {
                          {"study.families", join(c.study_families, [](MeshFamily f) { return to_string(f); })},
                          {"study.levels", join(c.study_levels, [](int n) { return std::to_string(n); })},
                          {"study.nus", join(c.study_nus, fmt)},
                          {"study.alpha", join(c.study_alpha, on_off)},
                          {"study.workers", std::to_string(c.study_workers)},
                          {"output.dir", c.output_dir},
                      });
  return kv;
}

std::string render_config(const RunConfig& config) {
  std::string out;
  for (const auto& [k, v] : effective_config(config)) out += k + " = " + v + "\n";
  return out;
}

BenchmarkSpec benchmark_spec(const RunConfig& c) {
  BenchmarkSpec spec;
  spec.kind = c.benchmark();
  spec.model = c.model;
  spec.stab = c.stab;
  spec.load = c.effective_load();
  spec.steps = c.steps;
  spec.adaptive = c.adaptive;
  spec.newton = c.newton;
  return spec;
}

StudyOptions study_options(const RunConfig& c) {
  StudyOptions opt;
  opt.base = benchmark_spec(c);
  opt.families = c.study_families;
  opt.levels = c.study_levels;
  opt.nus = c.study_nus;
  opt.alpha_modes = c.study_alpha;
  opt.mesh = c.mesh;
  opt.reference_level = c.reference_level;
  opt.reference_cache_dir = c.reference_cache_dir;
  opt.workers = c.study_workers;
  return opt;
}

Domain parse_domain(const std::string& text) {
  if (text == "unit") return Domain::unit_square();
  if (text == "cook") return benchmark_domain(Benchmark::Cook);
  if (text == "punch") return benchmark_domain(Benchmark::Punch);
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("unknown domain '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const auto values = to_list<double>(text.substr(colon + 1), to_double);
  if (kind == "rect") {
    if (values.size() != 2) throw ConfigError("rect domain needs W,H");
    return Domain::rectangle(values[0], values[1]);
  }
  if (kind == "quad") {
    if (values.size() != 8) throw ConfigError("quad domain needs 8 coordinates");
    return Domain::tapered({Vec2(values[0], values[1]), Vec2(values[2], values[3]), Vec2(values[4], values[5]),
                            Vec2(values[6], values[7])});
  }
  throw ConfigError("unknown domain '" + text + "'");
}

}  // namespace vemhyper
