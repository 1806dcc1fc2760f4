#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>

#include "polyxfem/config.hpp"
#include "polyxfem/mvc.hpp"
#include "polyxfem/patch_test.hpp"
#include "polyxfem/runner.hpp"

namespace py = pybind11;
using namespace polyxfem;

namespace {

Polygon to_polygon(const Eigen::MatrixX2d& pts) {
  Polygon p;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) p.push_back(Vec2(pts(i, 0), pts(i, 1)));
  return p;
}

py::dict outcome_dict(const RunOutcome& out) {
  py::dict d;
  d["converged"] = out.converged;
  d["n_elems"] = out.mesh.n_elems();
  d["n_nodes"] = out.mesh.n_nodes();
  d["n_dofs"] = out.n_dofs;
  d["total_iters"] = out.total_iters;
  d["wall_seconds"] = out.wall_seconds;
  d["tip_h"] = out.tip_h;
  d["out_dir"] = out.out_dir;
  py::list steps;
  for (const auto& s : out.steps) {
    py::dict sd;
    sd["load"] = s.load;
    sd["iters"] = s.iters;
    sd["lambda"] = s.lambda;
    sd["J"] = s.J;
    if (!s.KI.empty()) {
      sd["KI"] = s.KI;
      sd["KII"] = s.KII;
    }
    steps.append(sd);
  }
  d["steps"] = steps;
  return d;
}

RunOutcome run_checked(const RunConfig& cfg, const std::string& out_dir) {
  RunOutcome out = run_config(cfg, out_dir, nullptr);
  if (out.exit_code == 1) {
    std::string msg = "invalid configuration";
    for (const auto& e : out.errors) msg += "\n  " + e;
    throw std::invalid_argument(msg);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Nonlinear XFEM fracture solver on polygonal meshes";

  m.def(
      "run",
      [](const std::string& config_path, const std::string& out_dir) {
        return outcome_dict(run_checked(load_config(config_path), out_dir));
      },
      py::arg("config_path"), py::arg("out_dir") = "out/python",
      "Execute a JSON-configured analysis; returns the step history and "
      "writes the same artifacts as the command-line tool.");

  m.def(
      "run_json",
      [](const std::string& config_text, const std::string& out_dir) {
        return outcome_dict(run_checked(parse_config(config_text), out_dir));
      },
      py::arg("config_text"), py::arg("out_dir") = "out/python",
      "Same as run(), from an in-memory JSON string.");

  m.def(
      "patch_test",
      [](int n_seeds, unsigned rng_seed) {
        Domain dom;
        dom.outer = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
        MeshSpec spec;
        spec.n_seeds = n_seeds;
        spec.lloyd_iters = 30;
        spec.rng_seed = rng_seed;
        const PolyMesh mesh = generate_mesh(dom, spec);
        Eigen::Matrix2d A;
        A << 0.8, 0.25, -0.4, 1.1;
        const PatchTestResult corr = run_patch_test(mesh, A, true);
        const PatchTestResult raw = run_patch_test(mesh, A, false);
        py::dict d;
        d["n_elems"] = corr.n_elems;
        d["l2_corrected"] = corr.l2_err;
        d["h1_corrected"] = corr.h1_err;
        d["l2_raw"] = raw.l2_err;
        d["h1_raw"] = raw.h1_err;
        return d;
      },
      py::arg("n_seeds"), py::arg("rng_seed") = 17,
      "Linear-field reproduction errors on a centroidal Voronoi mesh of the "
      "unit square, with and without gradient correction.");

  m.def(
      "shape_values",
      [](const Eigen::MatrixX2d& polygon, const Eigen::MatrixX2d& points) {
        const Polygon poly = to_polygon(polygon);
        Eigen::MatrixXd vals(points.rows(), polygon.rows());
        Eigen::VectorXd N;
        for (Eigen::Index i = 0; i < points.rows(); ++i) {
          mean_value_shape(poly, Vec2(points(i, 0), points(i, 1)), N);
          vals.row(i) = N.transpose();
        }
        return vals;
      },
      py::arg("polygon"), py::arg("points"),
      "Mean value shape functions of a CCW polygon, one row per query point.");
}
