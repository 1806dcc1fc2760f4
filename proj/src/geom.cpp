#include "polyxfem/geom.hpp"

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bg = boost::geometry;

namespace polyxfem {

namespace {

using BPt = bg::model::d2::point_xy<double>;
using BPoly = bg::model::polygon<BPt, false, true>;  // ccw, closed

BPoly to_boost(const Polygon& p) {
  BPoly out;
  for (const auto& v : p) bg::append(out.outer(), BPt(v.x(), v.y()));
  bg::correct(out);
  return out;
}

BPoly to_boost(const Domain& d) {
  BPoly out = to_boost(d.outer);
  out.inners().resize(d.holes.size());
  for (size_t h = 0; h < d.holes.size(); ++h)
    for (const auto& v : d.holes[h]) bg::append(out.inners()[h], BPt(v.x(), v.y()));
  bg::correct(out);
  return out;
}

std::vector<Polygon> from_boost(const std::vector<BPoly>& polys, double area_tol) {
  std::vector<Polygon> out;
  for (const auto& bp : polys) {
    Polygon ring;
    const auto& o = bp.outer();
    for (size_t i = 0; i + 1 < o.size(); ++i) ring.emplace_back(o[i].x(), o[i].y());
    ensure_ccw(ring);
    ring = dedupe_ring(ring, 1e-14 * (1.0 + polygon_diameter(ring)));
    if (ring.size() >= 3 && polygon_area(ring) > area_tol) out.push_back(std::move(ring));
  }
  return out;
}

}  // namespace

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double polygon_area(const Polygon& p) {
  double s = 0.0;
  const size_t n = p.size();
  for (size_t i = 0; i < n; ++i) s += cross2(p[i], p[(i + 1) % n]);
  return 0.5 * s;
}

Vec2 polygon_centroid(const Polygon& p) {
  const size_t n = p.size();
  double a = 0.0;
  Vec2 c = Vec2::Zero();
  for (size_t i = 0; i < n; ++i) {
    const double w = cross2(p[i], p[(i + 1) % n]);
    a += w;
    c += w * (p[i] + p[(i + 1) % n]);
  }
  if (std::abs(a) < 1e-300) {  // degenerate ring, fall back to vertex mean
    c.setZero();
    for (const auto& v : p) c += v;
    return c / double(n);
  }
  return c / (3.0 * a);
}

double polygon_diameter(const Polygon& p) {
  double d2 = 0.0;
  for (size_t i = 0; i < p.size(); ++i)
    for (size_t j = i + 1; j < p.size(); ++j) d2 = std::max(d2, (p[i] - p[j]).squaredNorm());
  return std::sqrt(d2);
}

void polygon_bbox(const Polygon& p, Vec2& lo, Vec2& hi) {
  lo = Vec2(1e300, 1e300);
  hi = -lo;
  for (const auto& v : p) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
}

bool point_in_polygon(const Vec2& x, const Polygon& p) {
  const size_t n = p.size();
  bool inside = false;
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = p[j];
    const Vec2& b = p[i];
    if (segment_distance(x, a, b) < 1e-12 * (1.0 + (b - a).norm())) return true;
    if ((b.y() > x.y()) != (a.y() > x.y())) {
      const double t = (x.y() - b.y()) / (a.y() - b.y());
      if (x.x() < b.x() + t * (a.x() - b.x())) inside = !inside;
    }
  }
  return inside;
}

void ensure_ccw(Polygon& p) {
  if (polygon_area(p) < 0.0) std::reverse(p.begin(), p.end());
}

Polygon dedupe_ring(const Polygon& p, double tol) {
  Polygon out;
  for (const auto& v : p) {
    if (out.empty() || (v - out.back()).norm() > tol) out.push_back(v);
  }
  while (out.size() > 1 && (out.front() - out.back()).norm() <= tol) out.pop_back();
  return out;
}

double segment_distance(const Vec2& x, const Vec2& a, const Vec2& b, double* t_out) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  double t = len2 > 0.0 ? (x - a).dot(d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  if (t_out) *t_out = t;
  return (x - (a + t * d)).norm();
}

Polygon clip_halfplane(const Polygon& poly, const Vec2& p0, const Vec2& n) {
  Polygon out;
  const size_t m = poly.size();
  if (m == 0) return out;
  for (size_t i = 0; i < m; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % m];
    const double da = n.dot(a - p0);
    const double db = n.dot(b - p0);
    if (da <= 0.0) out.push_back(a);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
      out.push_back(a + (da / (da - db)) * (b - a));
    }
  }
  return out;
}

void split_convex_by_line(const Polygon& poly, const Vec2& p0, const Vec2& n,
                          Polygon& neg, Polygon& pos) {
  neg = clip_halfplane(poly, p0, n);
  pos = clip_halfplane(poly, p0, -n);
}

bool star_shaped_wrt(const Polygon& p, const Vec2& c) {
  const size_t n = p.size();
  const double scale = polygon_diameter(p);
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = p[i];
    const Vec2& b = p[(i + 1) % n];
    if (cross2(b - a, c - a) < 1e-12 * scale * scale) return false;
  }
  return true;
}

std::vector<Tri> fan_triangulate(const Polygon& p, const Vec2& c) {
  std::vector<Tri> tris;
  const size_t n = p.size();
  for (size_t i = 0; i < n; ++i) {
    Tri t{p[i], p[(i + 1) % n], c};
    if (t.area() > 0.0) tris.push_back(t);
  }
  return tris;
}

std::vector<Tri> ear_clip(const Polygon& p) {
  std::vector<Vec2> v(p.begin(), p.end());
  std::vector<Tri> tris;
  const double scale2 = polygon_diameter(p) * polygon_diameter(p);
  int guard = int(v.size() * v.size()) + 16;
  while (v.size() > 3 && guard-- > 0) {
    bool clipped = false;
    for (size_t i = 0; i < v.size(); ++i) {
      const size_t n = v.size();
      const Vec2& a = v[(i + n - 1) % n];
      const Vec2& b = v[i];
      const Vec2& c = v[(i + 1) % n];
      const double ar = 0.5 * cross2(b - a, c - a);
      if (ar < -1e-14 * scale2) continue;  // reflex corner
      bool empty = true;
      for (size_t j = 0; j < n && empty; ++j) {
        if (j == i || j == (i + n - 1) % n || j == (i + 1) % n) continue;
        const Vec2& q = v[j];
        const double s1 = cross2(b - a, q - a);
        const double s2 = cross2(c - b, q - b);
        const double s3 = cross2(a - c, q - c);
        if (s1 > 0.0 && s2 > 0.0 && s3 > 0.0) empty = false;
      }
      if (!empty) continue;
      if (ar > 1e-14 * scale2) tris.push_back({a, b, c});
      v.erase(v.begin() + long(i));
      clipped = true;
      break;
    }
    if (!clipped) break;  // numerically stuck, give up with what we have
  }
  if (v.size() == 3) {
    Tri t{v[0], v[1], v[2]};
    if (t.area() > 0.0) tris.push_back(t);
  }
  return tris;
}

std::vector<Tri> triangulate(const Polygon& p) {
  const Vec2 c = polygon_centroid(p);
  if (star_shaped_wrt(p, c)) return fan_triangulate(p, c);
  return ear_clip(p);
}

std::vector<Polygon> polygon_intersection(const Polygon& a, const Polygon& b, double area_tol) {
  std::vector<BPoly> out;
  bg::intersection(to_boost(a), to_boost(b), out);
  return from_boost(out, area_tol);
}

std::vector<Polygon> polygon_difference(const Polygon& a, const Polygon& b, double area_tol) {
  std::vector<BPoly> out;
  bg::difference(to_boost(a), to_boost(b), out);
  return from_boost(out, area_tol);
}

std::vector<Polygon> polygon_domain_intersection(const Polygon& a, const Domain& d, double area_tol) {
  std::vector<BPoly> out;
  bg::intersection(to_boost(a), to_boost(d), out);
  return from_boost(out, area_tol);
}

double Domain::area() const {
  double a = polygon_area(outer);
  for (const auto& h : holes) a -= std::abs(polygon_area(h));
  return a;
}

bool Domain::contains(const Vec2& p) const {
  if (!point_in_polygon(p, outer)) return false;
  for (const auto& h : holes) {
    // Boundary points of a hole belong to the domain; strict interior does not.
    bool on_edge = false;
    const size_t n = h.size();
    for (size_t i = 0; i < n; ++i) {
      if (segment_distance(p, h[i], h[(i + 1) % n]) < 1e-12 * (1.0 + polygon_diameter(h))) {
        on_edge = true;
        break;
      }
    }
    if (!on_edge && point_in_polygon(p, h)) return false;
  }
  return true;
}

void Domain::bbox(Vec2& lo, Vec2& hi) const { polygon_bbox(outer, lo, hi); }

}  // namespace polyxfem
