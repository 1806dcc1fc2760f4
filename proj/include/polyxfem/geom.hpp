#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace polyxfem {

using Vec2 = Eigen::Vector2d;

// Simple polygon stored as an open CCW ring. Collinear consecutive vertices
// are permitted (hanging nodes are ordinary ring vertices).
using Polygon = std::vector<Vec2>;

// Meshing domain: CCW outer boundary minus a set of CCW hole rings.
struct Domain {
  Polygon outer;
  std::vector<Polygon> holes;

  double area() const;
  bool contains(const Vec2& p) const;
  void bbox(Vec2& lo, Vec2& hi) const;
};

double cross2(const Vec2& a, const Vec2& b);

double polygon_area(const Polygon& p);          // signed, positive for CCW
Vec2 polygon_centroid(const Polygon& p);
double polygon_diameter(const Polygon& p);      // max vertex pair distance
void polygon_bbox(const Polygon& p, Vec2& lo, Vec2& hi);
bool point_in_polygon(const Vec2& x, const Polygon& p);   // boundary counts as inside
void ensure_ccw(Polygon& p);
Polygon dedupe_ring(const Polygon& p, double tol);

// Distance from x to segment [a,b]; t receives the clamped parameter.
double segment_distance(const Vec2& x, const Vec2& a, const Vec2& b, double* t = nullptr);

// Keeps the closed half plane { x : n.dot(x - p0) <= 0 }. Clipping a convex
// ring yields a convex ring; the input must be convex.
Polygon clip_halfplane(const Polygon& poly, const Vec2& p0, const Vec2& n);

// Both closed sides of the line through p0 with normal n. Convex input only.
void split_convex_by_line(const Polygon& poly, const Vec2& p0, const Vec2& n,
                          Polygon& neg, Polygon& pos);

bool star_shaped_wrt(const Polygon& p, const Vec2& c);

// Fan triangulation about c; valid only when star shaped w.r.t. c.
// Triangles are index-free vertex triples.
struct Tri {
  Vec2 a, b, c;
  double area() const { return 0.5 * cross2(b - a, c - a); }
};
std::vector<Tri> fan_triangulate(const Polygon& p, const Vec2& c);

// Ear clipping fallback for simple non star shaped polygons.
std::vector<Tri> ear_clip(const Polygon& p);

// Star shaped fan when possible, ear clipping otherwise.
std::vector<Tri> triangulate(const Polygon& p);

// Boolean operations (Boost.Geometry backed). Results are deduped CCW rings;
// components below area_tol are dropped.
std::vector<Polygon> polygon_intersection(const Polygon& a, const Polygon& b, double area_tol);
std::vector<Polygon> polygon_difference(const Polygon& a, const Polygon& b, double area_tol);
std::vector<Polygon> polygon_domain_intersection(const Polygon& a, const Domain& d, double area_tol);

}  // namespace polyxfem
