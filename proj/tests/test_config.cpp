#include "vemhyper/config.hpp"
#include "vemhyper/run.hpp"

#include <sstream>

#include "doctest.h"

using namespace vemhyper;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is, "t.cfg");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("defaults are resolved when the file is empty") {
  const RunConfig c = parse("# nothing here\n\n");
  CHECK(c.problem == "simple-shear");
  CHECK(c.family == MeshFamily::DQ2S);
  CHECK(c.stab.alpha_on);
  CHECK(c.stab.taylor_order == 5);
  CHECK(c.effective_load() == 5.0);
}

TEST_CASE("keys map onto the run configuration") {
  const RunConfig c = parse(
      "problem = cook\n"
      "mesh.family = iss   # trailing comment\n"
      "mesh.N = 4\n"
      "material.model = mooney-rivlin\n"
      "material.E = 200\n"
      "material.nu = 0.49995\n"
      "stab.alpha = off\n"
      "load = 12.5\n"
      "newton.max_iter = 40\n"
      "study.levels = 2, 3\n"
      "study.alpha = on, off\n");
  CHECK(c.benchmark() == Benchmark::Cook);
  CHECK(c.family == MeshFamily::InterlockingSunStar);
  CHECK(c.level == 4);
  CHECK(c.model.kind == MaterialKind::MooneyRivlin);
  CHECK(c.model.poisson == 0.49995);
  CHECK_FALSE(c.stab.alpha_on);
  CHECK(c.effective_load() == 12.5);
  CHECK(c.newton.max_iter == 40);
  CHECK(c.study_levels == std::vector<int>{2, 3});
  CHECK(c.study_alpha == std::vector<bool>{true, false});
}

TEST_CASE("strict parsing rejects bad input with the line number") {
  CHECK(error_of("mesh.N = 3\nmesh.colour = red\n").find("t.cfg:2") != std::string::npos);
  CHECK(error_of("mesh.N = 3\nmesh.N = 4\n").find("t.cfg:2") != std::string::npos);
  CHECK(error_of("material.model = rubber\n").find("t.cfg:1") != std::string::npos);
  CHECK_FALSE(error_of("mesh.N = three\n").empty());
  CHECK_FALSE(error_of("mesh.N\n").empty());
  CHECK_FALSE(error_of("material.nu = 0.5\n").empty());
  CHECK_FALSE(error_of("study.levels =\n").empty());
  CHECK_FALSE(error_of("stab.taylor_order = 0\n").empty());
  CHECK_FALSE(error_of("problem = custom\n").empty());
}

TEST_CASE("rendered config parses back to the same effective config") {
  const RunConfig c = parse("problem = punch\nmaterial.model = ogden\nmaterial.nu = -0.95\nmesh.distortion = 0.1\n");
  const std::string text = render_config(c);
  const RunConfig back = parse(text);
  CHECK(effective_config(back) == effective_config(c));
  CHECK(text.find("material.ogden_alphas") != std::string::npos);
}

TEST_CASE("custom problems take side conditions") {
  const RunConfig c = parse(
      "problem = custom\nmesh.file = strip.vpoly\nbc.left.ux = 0\nbc.bottom.uy = 0\nbc.right.tx = 20\n");
  CHECK_FALSE(c.is_benchmark());
  REQUIRE(c.sides.count(4) == 1);
  CHECK(c.sides.at(4).ux == 0.0);
  CHECK_FALSE(c.sides.at(4).uy.has_value());
  CHECK(c.sides.at(2).has_traction);
  CHECK(c.sides.at(2).traction.x() == 20.0);
}

TEST_CASE("domain strings") {
  CHECK(parse_domain("unit").corners()[2].isApprox(Vec2(1, 1)));
  CHECK(parse_domain("cook").corners()[2].isApprox(Vec2(48, 60)));
  CHECK(parse_domain("rect:2,1").corners()[2].isApprox(Vec2(2, 1)));
  CHECK_THROWS_AS(parse_domain("rect:2"), InvalidInput);
  CHECK_THROWS_AS(parse_domain("torus"), InvalidInput);
}

TEST_CASE("a benchmark run produces a finite probe and a reproducible record") {
  const RunConfig c = parse("problem = simple-shear\nmesh.N = 2\n");
  const RunOutcome out = execute_run(c);
  REQUIRE(out.state.converged);
  REQUIRE(out.has_probe);
  CHECK(std::isfinite(out.probe.x()));
  CHECK(out.probe.x() > 0);
  CHECK(out.min_jacobian > 0);
  const auto j = run_json(c, out);
  CHECK(j.at("config").at("mesh.N") == "2");
  CHECK(j.at("converged") == true);
}

TEST_CASE("missing config file is an IO failure") {
  CHECK_THROWS_AS(load_config("/nonexistent/run.cfg"), std::ios_base::failure);
}
