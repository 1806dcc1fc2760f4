#pragma once

#include "polyxfem/geom.hpp"

namespace polyxfem {

// Physical-space quadrature: weights carry the full area/length measure.
struct QuadratureScheme {
  std::vector<Vec2> points;
  std::vector<double> weights;

  double total() const;
  size_t size() const { return points.size(); }
};

// 1D Gauss-Legendre on [-1,1], nodes ascending. Computed by Newton iteration
// on P_n; no tabulated coefficients.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Rule on the reference triangle (0,0),(1,0),(0,1) exact for total degree
// >= `order`, all weights positive (collapsed-square Gauss product).
void triangle_rule(int order, std::vector<Vec2>& points, std::vector<double>& weights);

QuadratureScheme tri_scheme(const Tri& t, int order);
QuadratureScheme scheme_over_tris(const std::vector<Tri>& tris, int order);

// One-level polygon rule: physical sub-triangulation (centroid fan with ear
// clipping fallback), Gauss per sub-triangle.
QuadratureScheme triangulate_quadrature(const Polygon& poly, int order);

// n-point Gauss on segment [a,b]; weights sum to the segment length.
QuadratureScheme edge_gauss(const Vec2& a, const Vec2& b, int n);

}  // namespace polyxfem
