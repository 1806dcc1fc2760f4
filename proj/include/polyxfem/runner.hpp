#pragma once

#include "polyxfem/config.hpp"

#include <iosfwd>

namespace polyxfem {

// Everything a gate or caller needs from one completed run.
struct RunOutcome {
  int exit_code = 0;  // 0 ok, 1 validation failure, 2 solver failure
  std::vector<std::string> errors;
  std::string out_dir;

  PolyMesh mesh;
  int n_dofs = 0;
  bool converged = false;
  int total_iters = 0;
  double wall_seconds = 0;

  struct StepData {
    double load = 0;
    int iters = 0;
    double lambda = 1;       // axial far-field stretch (from mean top-edge rise)
    std::vector<double> J;   // tip-major over j_radius_factors
    std::vector<double> KI, KII;  // per tip (sif runs)
    double b = 0;            // half of the maximal face opening (tearing runs)
  };
  std::vector<StepData> steps;
  std::vector<double> tip_h;  // sqrt of tip element area, per tip
};

// Executes the configured run, writing artifacts under out_dir: the mesh
// (native + VTK), per-step deformed VTK with stress fields, CSV curves, the
// Newton log, and a JSON summary. `console` receives one progress line per
// step when given.
RunOutcome run_config(const RunConfig& cfg, const std::string& out_dir,
                      std::ostream* console = nullptr);

// Mesh generation and artifacts alone; no solve.
RunOutcome mesh_only(const RunConfig& cfg, const std::string& out_dir);

// Patch-test sweep over centroidal Voronoi meshes of the unit square; one CSV
// row per requested size: elems, L2/H1 with corrected gradients, L2/H1 raw.
void patch_test_table(const std::vector<int>& sizes, std::ostream& out);

}  // namespace polyxfem
