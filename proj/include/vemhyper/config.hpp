#pragma once

#include "vemhyper/analysis.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vemhyper {

/// Rejected configuration text or values.
class ConfigError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// Boundary data of one domain side for custom problems. Unset components
/// are free; tractions are dead loads in N/m.
struct SideCondition {
  std::optional<double> ux, uy;
  Vec2 traction = Vec2::Zero();
  bool has_traction = false;
};

/// Flat `key = value` run configuration with dotted section prefixes.
struct RunConfig {
  /// simple-shear | cook | punch | custom
  std::string problem = "simple-shear";

  MeshFamily family = MeshFamily::DQ2S;
  int level = 3;
  MeshOptions mesh{};
  /// VPOLY file; required for custom problems, unused otherwise.
  std::string mesh_file;

  MaterialModel model{};
  StabilizationConfig stab{};

  int steps = 5;
  bool adaptive = true;
  NewtonSettings newton{};
  /// Benchmark load magnitude; unset means the benchmark default.
  std::optional<double> load;
  Vec2 body_force = Vec2::Zero();
  /// Custom-problem boundary data keyed by side tag (1 bottom .. 4 left).
  std::map<int, SideCondition> sides;

  int reference_level = 6;
  std::string reference_cache_dir;

  std::vector<MeshFamily> study_families{MeshFamily::DQ2S};
  std::vector<int> study_levels{2, 3, 4, 5};
  std::vector<double> study_nus{0.3};
  std::vector<bool> study_alpha{true};
  int study_workers = 0;

  std::string output_dir = ".";

  bool is_benchmark() const { return problem != "custom"; }
  Benchmark benchmark() const;
  double effective_load() const;

  /// Cross-field checks; throws ConfigError.
  void validate() const;
};

/// Parses and validates config text. Unknown or repeated keys, malformed
/// values and out-of-range settings raise ConfigError naming the line.
RunConfig parse_config(std::istream& is, const std::string& source = "<config>");
/// Throws std::ios_base::failure when the file cannot be read.
RunConfig load_config(const std::string& path);

/// Every key with its resolved value, in a stable order; parsing the
/// rendered text reproduces the configuration.
std::vector<std::pair<std::string, std::string>> effective_config(const RunConfig& config);
std::string render_config(const RunConfig& config);

BenchmarkSpec benchmark_spec(const RunConfig& config);
StudyOptions study_options(const RunConfig& config);

/// Parses `unit`, `rect:W,H`, `cook` or `quad:x0,y0,x1,y1,x2,y2,x3,y3`.
Domain parse_domain(const std::string& text);

}  // namespace vemhyper
