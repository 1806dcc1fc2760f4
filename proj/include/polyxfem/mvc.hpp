#pragma once

#include "polyxfem/quadrature.hpp"

namespace polyxfem {

// Mean value coordinates on an arbitrary simple CCW ring. Valid for convex and
// concave polygons; collinear ring vertices (hanging nodes) participate as
// regular nodes. Limits: within vertex_tol of a vertex the Kronecker vector is
// returned, within edge_tol of an edge the linear edge trace.
void mean_value_shape(const Polygon& ring, const Vec2& x, Eigen::VectorXd& N);

// Values and gradients; dN row i = grad N_i. At on-edge points the gradient is
// evaluated from a point nudged toward the centroid (values keep the trace).
void mean_value_shape_grad(const Polygon& ring, const Vec2& x, Eigen::VectorXd& N,
                           Eigen::Matrix<double, Eigen::Dynamic, 2>& dN);

// Regular n-gon inscribed in the unit circle, first vertex at angle pi/2.
Polygon canonical_ngon(int n);

// Isoparametric map ref ring -> phys ring at reference point xi.
// J0 is the true Jacobian d(phys)/d(xi).
void isoparametric_map(const Polygon& ref, const Polygon& phys, const Vec2& xi,
                       Vec2& X, Eigen::Matrix2d& J0);

// Two-level rule: Gauss on canonical-element sub-triangles mapped through the
// isoparametric map. Retained for canonical-element verification; production
// integration uses the one-level physical rule.
QuadratureScheme two_level_quadrature(const Polygon& phys_ring, int order);

// Per-node constant gradient correction for one element:
//   c_i = (1/|O|) (boundary integral of N_i n ds - volume integral of grad N_i)
// evaluated with the element's own interior scheme, so corrected gradients
// satisfy the divergence identity exactly for that scheme.
std::vector<Vec2> gradient_correction(const Polygon& ring, const QuadratureScheme& scheme);

}  // namespace polyxfem
