#include "vemhyper/analysis.hpp"
#include "vemhyper/config.hpp"
#include "vemhyper/run.hpp"
#include "vemhyper/stabilization.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace vemhyper;

namespace {

py::array_t<double> as_array(const std::vector<Vec2>& pts) {
  py::array_t<double> out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{2}});
  auto a = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    a(i, 0) = pts[i].x();
    a(i, 1) = pts[i].y();
  }
  return out;
}

py::array_t<double> as_array(const VecX& u) {
  const py::ssize_t n = u.size() / 2;
  py::array_t<double> out({n, py::ssize_t{2}});
  auto a = out.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < n; ++i) {
    a(i, 0) = u(2 * i);
    a(i, 1) = u(2 * i + 1);
  }
  return out;
}

std::vector<Vec2> as_points(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  if (arr.ndim() != 2 || arr.shape(1) != 2) throw InvalidInput("expected an (n, 2) array of points");
  auto a = arr.unchecked<2>();
  std::vector<Vec2> pts;
  for (py::ssize_t i = 0; i < a.shape(0); ++i) pts.emplace_back(a(i, 0), a(i, 1));
  return pts;
}

RunConfig config_from(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is, "<string>");
}

py::dict history(const SolutionState& state) {
  py::list steps;
  for (const auto& s : state.history) {
    py::dict d;
    d["load_factor"] = s.load_factor;
    d["iterations"] = s.iterations;
    d["converged"] = s.converged;
    d["failure"] = s.failure;
    d["residual_norms"] = s.residual_norms;
    steps.append(d);
  }
  py::dict h;
  h["steps"] = steps;
  h["total_iterations"] = state.total_iterations();
  return h;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hyperelastic virtual element solver on polygonal meshes";

  py::class_<PolygonalMesh>(m, "Mesh")
      .def_property_readonly("vertices", [](const PolygonalMesh& mesh) { return as_array(mesh.vertices); })
      .def_readonly("elements", &PolygonalMesh::elements)
      .def_property_readonly("num_vertices", &PolygonalMesh::num_vertices)
      .def_property_readonly("num_elements", &PolygonalMesh::num_elements)
      .def("element_area", &PolygonalMesh::element_area)
      .def("total_area", &PolygonalMesh::total_area)
      .def("mean_diameter", [](const PolygonalMesh& mesh) { return mean_diameter(mesh); })
      .def("to_vpoly",
           [](const PolygonalMesh& mesh) {
             std::ostringstream os;
             write_vpoly(os, mesh);
             return os.str();
           })
      .def_static("from_vpoly",
                  [](const std::string& text) {
                    std::istringstream is(text);
                    return read_vpoly(is);
                  })
      .def("__repr__", [](const PolygonalMesh& mesh) {
        return "<Mesh " + std::to_string(mesh.num_vertices()) + " vertices, " + std::to_string(mesh.num_elements()) +
               " elements>";
      });

  m.def(
      "generate_mesh",
      [](const std::string& family, int level, const std::string& domain, double distortion, int lloyd_iters,
         std::uint64_t seed) {
        MeshOptions o;
        o.distortion = distortion;
        o.lloyd_iters = lloyd_iters;
        o.seed = seed;
        return generate(mesh_family_from_string(family), level, parse_domain(domain), o);
      },
      py::arg("family"), py::arg("level"), py::arg("domain") = "unit", py::arg("distortion") = 0.3,
      py::arg("lloyd_iters") = 10, py::arg("seed") = 1,
      "Mesh family sq1 | dq2s | ss | iss | vrn with 2^level cells per side.");

  py::class_<MaterialModel>(m, "Material")
      .def_static("neo_hookean", &MaterialModel::neo_hookean, py::arg("E"), py::arg("nu"))
      .def_static("mooney_rivlin", &MaterialModel::mooney_rivlin, py::arg("E"), py::arg("nu"), py::arg("ratio") = 4.0)
      .def_static("ogden", &MaterialModel::ogden, py::arg("E"), py::arg("nu"))
      .def_property_readonly("kind", [](const MaterialModel& mm) { return to_string(mm.kind); })
      .def_readonly("E", &MaterialModel::youngs)
      .def_readonly("nu", &MaterialModel::poisson)
      .def_property_readonly("mu", &MaterialModel::mu)
      .def_property_readonly("lam", &MaterialModel::lambda)
      .def("energy", [](const MaterialModel& mm, const Mat2& F) { return energy_density(mm, F); })
      .def("stress", [](const MaterialModel& mm, const Mat2& F) { return evaluate(mm, F).stress; },
           "First Piola-Kirchhoff stress.")
      .def("tangent", [](const MaterialModel& mm, const Mat2& F) { return evaluate(mm, F).tangent; },
           "dP/dF with rows and columns flattened as 2*i+J.");

  m.def("taylor_lambda", &taylor_lambda, py::arg("E"), py::arg("nu"), py::arg("order") = 5, py::arg("nu0") = 0.0);

  m.def(
      "mvee",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& points) {
        const Ellipse e = mvee(as_points(points));
        py::dict d;
        d["center"] = Vec2(e.center);
        d["shape"] = Mat2(e.shape);
        d["outer_radius"] = e.outer_radius;
        d["inner_radius"] = e.inner_radius;
        d["angle"] = e.angle;
        d["area"] = e.area();
        return d;
      },
      py::arg("points"), "Minimum-area enclosing ellipse.");

  m.def(
      "stab_params",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& polygon, const MaterialModel& mm,
         bool alpha) {
        StabilizationConfig c;
        c.alpha_on = alpha;
        const auto p = stab_params(as_points(polygon), mm, c);
        py::dict d;
        d["beta"] = p.beta;
        d["alpha"] = p.alpha;
        d["mu_hat"] = p.mu_hat;
        d["lambda_hat"] = p.lambda_hat;
        return d;
      },
      py::arg("polygon"), py::arg("material"), py::arg("alpha") = true);

  m.def(
      "effective_config", [](const std::string& text) { return effective_config(config_from(text)); },
      py::arg("text"), "Parse config text and list every key with defaults resolved.");

  m.def(
      "run",
      [](const std::string& text) {
        const RunConfig config = config_from(text);
        RunOutcome out;
        {
          py::gil_scoped_release release;
          out = execute_run(config);
        }
        py::dict d;
        d["converged"] = out.state.converged;
        d["nodes"] = as_array(out.disc->nodes());
        d["displacement"] = as_array(out.state.displacement);
        d["load_factor"] = out.state.load_factor;
        d["history"] = history(out.state);
        d["probe"] = out.has_probe ? py::object(py::make_tuple(out.probe.x(), out.probe.y())) : py::object(py::none());
        d["min_jacobian"] = out.min_jacobian;
        d["runtime_s"] = out.runtime_s;
        d["config"] = effective_config(config);
        return d;
      },
      py::arg("config"), "Solve one problem described by config text.");

  m.def(
      "study",
      [](const std::string& text) {
        const StudyOptions options = study_options(config_from(text));
        StudyResult result;
        {
          py::gil_scoped_release release;
          result = convergence_study(options);
        }
        py::list rows;
        for (const auto& r : result.records) {
          py::dict d;
          d["family"] = to_string(r.family);
          d["N"] = r.level;
          d["hbar"] = r.hbar;
          d["nu"] = r.nu;
          d["alpha"] = r.alpha_on;
          d["probe"] = py::make_tuple(r.probe.x(), r.probe.y());
          d["h1_error"] = r.h1_error;
          d["newton_iters_total"] = r.newton_iters_total;
          d["converged"] = r.converged;
          d["failure"] = r.failure;
          rows.append(d);
        }
        py::list slopes;
        for (const auto& s : result.slopes) {
          py::dict d;
          d["family"] = to_string(s.family);
          d["nu"] = s.nu;
          d["alpha"] = s.alpha_on;
          d["slope"] = s.slope ? py::object(py::float_(*s.slope)) : py::object(py::none());
          slopes.append(d);
        }
        std::ostringstream csv;
        write_study_csv(csv, result);
        py::dict d;
        d["records"] = rows;
        d["slopes"] = slopes;
        d["csv"] = csv.str();
        return d;
      },
      py::arg("config"), "Run the convergence sweep described by config text.");
}
