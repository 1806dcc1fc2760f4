#pragma once

#include "polyxfem/polymesh.hpp"

namespace polyxfem {

struct CrackTip {
  Vec2 pos;
  Vec2 tangent;  // unit, points from the crack body toward the tip
  Vec2 normal;   // tangent rotated +90 degrees
};

// Piecewise linear crack in the undeformed configuration. The sign function
// and the tip branch are evaluated pointwise; both jump exactly across the
// polyline and nowhere else.
struct CrackGeometry {
  std::vector<Vec2> pts;
  std::vector<CrackTip> tips;

  // +-1 by the side of the closest segment; vertex ties resolved by the
  // larger-deviation segment so the sign is stable near kinks.
  double heaviside(const Vec2& x) const;
  double distance(const Vec2& x) const;

  // Tip polar coordinates: r distance, theta in (-pi, pi] measured from the
  // tip tangent. The crack face lies along theta = +-pi.
  void tip_polar(int tip, const Vec2& x, double& r, double& theta) const;
  double branch(int tip, const Vec2& x) const;  // sqrt(r) sin(theta/2)
  Vec2 branch_grad(int tip, const Vec2& x) const;
};

// Polyline ends strictly inside the domain become tips; other ends are pushed
// slightly outward so the cut exits through the boundary cleanly.
CrackGeometry make_crack(std::vector<Vec2> polyline, const Domain& dom);

// Translate the polyline until no mesh node or tip sits within eps of it;
// keeps cut topology unambiguous. Throws if no clear position is found.
void nudge_crack_off_mesh(CrackGeometry& crack, const PolyMesh& mesh, double eps);

// Convex pieces of `poly` cut along every crack segment that actually meets
// it, with an extra perpendicular cut through each interior tip so the tip is
// a piece vertex. Any simple polygon (triangulated first).
std::vector<Polygon> split_by_crack(const Polygon& poly, const CrackGeometry& crack);

// Length of the crack polyline inside the polygon.
double crack_length_inside(const Polygon& poly, const CrackGeometry& crack);

enum class NodeEnrich : char { none, heaviside, tip };

struct EnrichmentPlan {
  std::vector<NodeEnrich> node_kind;
  std::vector<int> node_tip;        // tip index for tip-enriched nodes, else -1
  std::vector<char> elem_has_crack;  // polyline meets the element interior
  std::vector<char> elem_has_tip;
  int n_heaviside = 0;
  int n_tip = 0;
};

// Tip enrichment for the nodes of tip-containing elements; sign enrichment
// for remaining nodes whose support the crack splits into two parts of
// relative area at least `min_side_ratio` each.
EnrichmentPlan classify_enrichment(const PolyMesh& mesh, const CrackGeometry& crack,
                                   double min_side_ratio = 1e-4);

}  // namespace polyxfem
