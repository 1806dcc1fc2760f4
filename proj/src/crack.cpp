#include "polyxfem/crack.hpp"

#include <cmath>
#include <stdexcept>

namespace polyxfem {

namespace {

Vec2 rot90(const Vec2& v) { return Vec2(-v.y(), v.x()); }

// Entry/exit parameters of segment [a,b] clipped to a convex ring.
bool clip_segment_convex(const Vec2& a, const Vec2& b, const Polygon& poly, double& t0,
                         double& t1) {
  t0 = 0.0;
  t1 = 1.0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2 edge = poly[(i + 1) % n] - p;
    const Vec2 nrm = -rot90(edge);  // outward for a CCW ring
    const double da = nrm.dot(a - p);
    const double db = nrm.dot(b - p);
    const double denom = db - da;
    if (std::abs(denom) < 1e-300) {
      if (da > 0.0) return false;
      continue;
    }
    const double t = -da / denom;
    if (denom > 0.0)
      t1 = std::min(t1, t);
    else
      t0 = std::max(t0, t);
    if (t0 >= t1) return false;
  }
  return true;
}

}  // namespace

double CrackGeometry::heaviside(const Vec2& x) const {
  double best_d = 1e300, best_dev = -1.0;
  double sign = 1.0;
  for (size_t s = 0; s + 1 < pts.size(); ++s) {
    const Vec2& a = pts[s];
    const Vec2& b = pts[s + 1];
    const double d = segment_distance(x, a, b);
    const double dev = std::abs(cross2(b - a, x - a)) / (b - a).norm();
    const double tie = 1e-12 * (1.0 + d);
    if (d < best_d - tie || (d < best_d + tie && dev > best_dev)) {
      best_d = d;
      best_dev = dev;
      sign = cross2(b - a, x - a) >= 0.0 ? 1.0 : -1.0;
    }
  }
  return sign;
}

double CrackGeometry::distance(const Vec2& x) const {
  double d = 1e300;
  for (size_t s = 0; s + 1 < pts.size(); ++s)
    d = std::min(d, segment_distance(x, pts[s], pts[s + 1]));
  return d;
}

void CrackGeometry::tip_polar(int tip, const Vec2& x, double& r, double& theta) const {
  const CrackTip& t = tips[size_t(tip)];
  const Vec2 d = x - t.pos;
  r = d.norm();
  theta = std::atan2(t.normal.dot(d), t.tangent.dot(d));
}

double CrackGeometry::branch(int tip, const Vec2& x) const {
  double r, th;
  tip_polar(tip, x, r, th);
  return std::sqrt(r) * std::sin(0.5 * th);
}

Vec2 CrackGeometry::branch_grad(int tip, const Vec2& x) const {
  double r, th;
  tip_polar(tip, x, r, th);
  if (r < 1e-300) return Vec2::Zero();
  const double inv = 0.5 / std::sqrt(r);
  const CrackTip& t = tips[size_t(tip)];
  return inv * (-std::sin(0.5 * th) * t.tangent + std::cos(0.5 * th) * t.normal);
}

CrackGeometry make_crack(std::vector<Vec2> polyline, const Domain& dom) {
  if (polyline.size() < 2) throw std::runtime_error("crack polyline needs two points");
  Vec2 lo, hi;
  dom.bbox(lo, hi);
  const double diam = (hi - lo).norm();

  CrackGeometry c;
  c.pts = std::move(polyline);

  const auto handle_end = [&](bool front) {
    const size_t iend = front ? 0 : c.pts.size() - 1;
    const size_t iprev = front ? 1 : c.pts.size() - 2;
    const Vec2 dir = (c.pts[iend] - c.pts[iprev]).normalized();
    // Strictly inside: in the domain and clear of its boundary.
    bool inside = dom.contains(c.pts[iend]);
    if (inside) {
      double dbnd = 1e300;
      const auto ring_dist = [&](const Polygon& ring) {
        for (size_t i = 0; i < ring.size(); ++i)
          dbnd = std::min(dbnd,
                          segment_distance(c.pts[iend], ring[i], ring[(i + 1) % ring.size()]));
      };
      ring_dist(dom.outer);
      for (const auto& h : dom.holes) ring_dist(h);
      if (dbnd < 1e-9 * diam) inside = false;
    }
    if (inside) {
      CrackTip t;
      t.pos = c.pts[iend];
      t.tangent = dir;
      t.normal = rot90(dir);
      c.tips.push_back(t);
    } else {
      c.pts[iend] += (1e-3 * diam) * dir;
    }
  };
  handle_end(true);
  handle_end(false);
  if (c.tips.empty()) throw std::runtime_error("crack has no tip inside the domain");
  return c;
}

void nudge_crack_off_mesh(CrackGeometry& crack, const PolyMesh& mesh, double eps) {
  const auto clear_of_mesh = [&]() {
    for (const auto& v : mesh.nodes)
      if (crack.distance(v) < eps) return false;
    // Tips must also stay clear of element edges so containment is unambiguous.
    for (const auto& t : crack.tips)
      for (const auto& ring : mesh.elems) {
        const size_t n = ring.size();
        for (size_t i = 0; i < n; ++i) {
          const Vec2& a = mesh.nodes[size_t(ring[i])];
          const Vec2& b = mesh.nodes[size_t(ring[(i + 1) % n])];
          if (segment_distance(t.pos, a, b) < eps) return false;
        }
      }
    return true;
  };

  Vec2 dir = crack.tips[0].normal;
  for (int attempt = 0; attempt < 16; ++attempt) {
    if (clear_of_mesh()) return;
    const Vec2 shift = 3.0 * eps * dir;
    for (auto& p : crack.pts) p += shift;
    for (auto& t : crack.tips) t.pos += shift;
    const double ga = 2.399963;  // rotate the retry direction, golden angle
    dir = Vec2(std::cos(ga) * dir.x() - std::sin(ga) * dir.y(),
               std::sin(ga) * dir.x() + std::cos(ga) * dir.y());
  }
  throw std::runtime_error("could not nudge crack clear of mesh features");
}

std::vector<Polygon> split_by_crack(const Polygon& poly, const CrackGeometry& crack) {
  const double area_tol = 1e-12 * std::abs(polygon_area(poly));
  std::vector<Polygon> pieces;
  for (const Tri& t : triangulate(poly)) pieces.push_back({t.a, t.b, t.c});

  const auto split_all = [&](const Vec2& p0, const Vec2& nrm, const Vec2& a, const Vec2& b,
                             bool whole_line) {
    std::vector<Polygon> out;
    out.reserve(pieces.size());
    for (auto& piece : pieces) {
      bool crossing = false;
      if (whole_line) {
        // Line through p0: split when vertices sit on both sides.
        bool neg = false, pos = false;
        for (const auto& v : piece) {
          const double s = nrm.dot(v - p0);
          neg = neg || s < 0.0;
          pos = pos || s > 0.0;
        }
        crossing = neg && pos;
      } else {
        double t0, t1;
        crossing = clip_segment_convex(a, b, piece, t0, t1) && t1 - t0 > 1e-12;
      }
      if (!crossing) {
        out.push_back(std::move(piece));
        continue;
      }
      Polygon neg, pos;
      split_convex_by_line(piece, p0, nrm, neg, pos);
      if (neg.size() >= 3 && std::abs(polygon_area(neg)) > area_tol) out.push_back(std::move(neg));
      if (pos.size() >= 3 && std::abs(polygon_area(pos)) > area_tol) out.push_back(std::move(pos));
    }
    pieces = std::move(out);
  };

  for (size_t s = 0; s + 1 < crack.pts.size(); ++s) {
    const Vec2& a = crack.pts[s];
    const Vec2& b = crack.pts[s + 1];
    split_all(a, rot90((b - a).normalized()), a, b, false);
  }
  // Perpendicular cut through each interior tip makes the tip a piece vertex,
  // so tip-fan quadrature can concentrate points toward the singularity.
  for (const auto& t : crack.tips)
    if (point_in_polygon(t.pos, poly)) split_all(t.pos, t.tangent, t.pos, t.pos, true);
  return pieces;
}

double crack_length_inside(const Polygon& poly, const CrackGeometry& crack) {
  Vec2 plo, phi;
  polygon_bbox(poly, plo, phi);
  double total = 0.0;
  for (size_t s = 0; s + 1 < crack.pts.size(); ++s) {
    const Vec2& a = crack.pts[s];
    const Vec2& b = crack.pts[s + 1];
    const Vec2 slo = a.cwiseMin(b), shi = a.cwiseMax(b);
    if (slo.x() > phi.x() || shi.x() < plo.x() || slo.y() > phi.y() || shi.y() < plo.y()) continue;
    // Sorted boundary crossings; midpoint membership decides each interval.
    std::vector<double> ts = {0.0, 1.0};
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
      const Vec2& p = poly[i];
      const Vec2& q = poly[(i + 1) % n];
      const double denom = cross2(b - a, q - p);
      if (std::abs(denom) < 1e-300) continue;
      const double t = cross2(p - a, q - p) / denom;
      const double u = cross2(p - a, b - a) / denom;
      if (t > 0.0 && t < 1.0 && u >= 0.0 && u <= 1.0) ts.push_back(t);
    }
    std::sort(ts.begin(), ts.end());
    for (size_t i = 0; i + 1 < ts.size(); ++i) {
      const Vec2 mid = a + 0.5 * (ts[i] + ts[i + 1]) * (b - a);
      if (point_in_polygon(mid, poly)) total += (ts[i + 1] - ts[i]) * (b - a).norm();
    }
  }
  return total;
}

EnrichmentPlan classify_enrichment(const PolyMesh& mesh, const CrackGeometry& crack,
                                   double min_side_ratio) {
  const int nn = mesh.n_nodes();
  const int ne = mesh.n_elems();
  EnrichmentPlan plan;
  plan.node_kind.assign(size_t(nn), NodeEnrich::none);
  plan.node_tip.assign(size_t(nn), -1);
  plan.elem_has_crack.assign(size_t(ne), 0);
  plan.elem_has_tip.assign(size_t(ne), 0);

  std::vector<Polygon> polys(static_cast<size_t>(ne));
  for (int e = 0; e < ne; ++e) {
    polys[size_t(e)] = mesh.element_polygon(e);
    const double len = crack_length_inside(polys[size_t(e)], crack);
    plan.elem_has_crack[size_t(e)] = len > 1e-9 * mesh.element_diameter(e) ? 1 : 0;
    for (size_t t = 0; t < crack.tips.size(); ++t)
      if (point_in_polygon(crack.tips[t].pos, polys[size_t(e)])) {
        plan.elem_has_tip[size_t(e)] = 1;
        for (int j : mesh.elems[size_t(e)]) {
          plan.node_kind[size_t(j)] = NodeEnrich::tip;
          plan.node_tip[size_t(j)] = int(t);
        }
      }
  }

  const auto supports = mesh.node_supports();
  for (int j = 0; j < nn; ++j) {
    if (plan.node_kind[size_t(j)] == NodeEnrich::tip) continue;
    bool touched = false;
    for (int e : supports[size_t(j)]) touched = touched || plan.elem_has_crack[size_t(e)];
    if (!touched) continue;
    double a_pos = 0.0, a_neg = 0.0;
    for (int e : supports[size_t(j)]) {
      const Polygon& poly = polys[size_t(e)];
      if (!plan.elem_has_crack[size_t(e)]) {
        (crack.heaviside(polygon_centroid(poly)) > 0.0 ? a_pos : a_neg) +=
            std::abs(polygon_area(poly));
      } else {
        for (const Polygon& piece : split_by_crack(poly, crack))
          (crack.heaviside(polygon_centroid(piece)) > 0.0 ? a_pos : a_neg) +=
              std::abs(polygon_area(piece));
      }
    }
    if (std::min(a_pos, a_neg) >= min_side_ratio * (a_pos + a_neg))
      plan.node_kind[size_t(j)] = NodeEnrich::heaviside;
  }

  for (int j = 0; j < nn; ++j) {
    if (plan.node_kind[size_t(j)] == NodeEnrich::heaviside) ++plan.n_heaviside;
    if (plan.node_kind[size_t(j)] == NodeEnrich::tip) ++plan.n_tip;
  }
  return plan;
}

}  // namespace polyxfem
