#pragma once

#include "polyxfem/crack.hpp"
#include "polyxfem/mvc.hpp"

namespace polyxfem {

struct XfemParams {
  int quad_order_std = 3;
  int quad_order_enriched = 7;
  bool corrected_gradients = true;  // divergence-consistent standard gradients
  double min_side_ratio = 1e-4;
};

// Dof layout: per node [std_x std_y] plus [enr_x enr_y] when enriched. The
// sign and branch enrichments are shifted to vanish at their node, so nodal
// displacements are the standard dofs alone.
struct XfemSpace {
  const PolyMesh* mesh = nullptr;
  CrackGeometry crack;
  EnrichmentPlan plan;
  XfemParams params;

  std::vector<int> node_base;   // first dof of the node's pair block
  std::vector<double> node_h;   // crack sign at the node (sign-enriched nodes)
  std::vector<double> node_a;   // branch value at the node (tip-enriched nodes)
  std::vector<char> elem_enriched;  // any enriched dof or crack in the element
  int n_dofs = 0;

  int node_pairs(int j) const { return plan.node_kind[size_t(j)] == NodeEnrich::none ? 1 : 2; }
};

XfemSpace build_space(const PolyMesh& mesh, CrackGeometry crack, const XfemParams& params);

// Generalized scalar shapes at one point: mode m contributes phi[m] times the
// dof pair at gdof[m] to each displacement component, with material gradient
// dphi row m. Standard modes come first, enriched modes follow.
struct ShapeEval {
  std::vector<int> gdof;
  Eigen::VectorXd phi;
  Eigen::Matrix<double, Eigen::Dynamic, 2> dphi;
  int n_modes = 0;
};

// `correction` may be null (raw gradients) or one constant per ring node; it
// applies to the standard modes only.
void evaluate_shapes(const XfemSpace& space, int elem, const Vec2& X,
                     const std::vector<Vec2>* correction, ShapeEval& out);

// Displacement and material displacement gradient at X from the dof vector.
void evaluate_deformation(const XfemSpace& space, int elem, const Vec2& X,
                          const Eigen::VectorXd& u, const std::vector<Vec2>* correction,
                          Vec2& disp, Eigen::Matrix2d& dudX);

// Integration rule for one element: split along the crack with a tip fan
// where a tip is present, plain sub-triangulation elsewhere.
QuadratureScheme element_scheme(const XfemSpace& space, int elem);

}  // namespace polyxfem
