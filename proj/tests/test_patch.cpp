#include <Eigen/Dense>

#include "doctest.h"
#include "polyxfem/patch_test.hpp"

using namespace polyxfem;

namespace {

Domain unit_square() {
  Domain d;
  d.outer = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
  return d;
}

}  // namespace

TEST_CASE("gradient-corrected shape functions pass the affine patch test") {
  Eigen::Matrix2d A;
  A << 2.0, 0.3, -0.1, -0.5;
  for (int n_seeds : {10, 50, 250}) {
    MeshSpec spec;
    spec.n_seeds = n_seeds;
    spec.lloyd_iters = 25;
    spec.rng_seed = 7;
    const PolyMesh m = generate_mesh(unit_square(), spec);

    const PatchTestResult corr = run_patch_test(m, A, true);
    const PatchTestResult raw = run_patch_test(m, A, false);
    CAPTURE(n_seeds);
    CAPTURE(corr.l2_err);
    CAPTURE(corr.h1_err);
    CAPTURE(raw.l2_err);
    CAPTURE(raw.h1_err);
    CHECK(corr.l2_err < 1e-10);
    CHECK(corr.h1_err < 1e-9);
    // Raw gradients keep a visible consistency error; the correction must
    // beat them by orders of magnitude, not round them.
    CHECK(raw.h1_err > 100.0 * corr.h1_err);
  }
}

TEST_CASE("patch test also holds on a refined mesh with hanging nodes") {
  Eigen::Matrix2d A;
  A << 1.0, 0.2, 0.0, 0.7;
  MeshSpec spec;
  spec.n_seeds = 40;
  spec.lloyd_iters = 25;
  spec.rng_seed = 9;
  RefineZone rz;
  rz.lo = Vec2(0.3, 0.4);
  rz.hi = Vec2(0.7, 0.6);
  rz.cell_size = 0.05;
  rz.align = Vec2(0.5, 0.5);
  spec.refine = rz;
  const PolyMesh m = generate_mesh(unit_square(), spec);
  const PatchTestResult corr = run_patch_test(m, A, true);
  CAPTURE(corr.l2_err);
  CAPTURE(corr.h1_err);
  CHECK(corr.l2_err < 1e-10);
  CHECK(corr.h1_err < 1e-9);
}
