#include "polyxfem/polymesh.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace polyxfem {

namespace {

struct Welder {
  double tol;
  std::vector<Vec2> nodes;
  std::unordered_map<std::int64_t, std::vector<int>> bins;

  std::int64_t key(std::int64_t ix, std::int64_t iy) const {
    return ix * 73856093LL ^ iy * 19349663LL;
  }
  int add(const Vec2& v) {
    const auto ix = std::int64_t(std::floor(v.x() / tol));
    const auto iy = std::int64_t(std::floor(v.y() / tol));
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = bins.find(key(ix + dx, iy + dy));
        if (it == bins.end()) continue;
        for (int id : it->second)
          if ((nodes[size_t(id)] - v).norm() <= tol) return id;
      }
    nodes.push_back(v);
    const int id = int(nodes.size()) - 1;
    bins[key(ix, iy)].push_back(id);
    return id;
  }
};

Polygon bbox_rect(const Vec2& lo, const Vec2& hi) {
  return {Vec2(lo.x(), lo.y()), Vec2(hi.x(), lo.y()), Vec2(hi.x(), hi.y()), Vec2(lo.x(), hi.y())};
}

// Voronoi cell of seed i clipped to the seed bounding rectangle. Seeds are
// visited nearest first; once the next seed is farther than twice the current
// cell radius no later bisector can cut.
Polygon raw_voronoi_cell(const std::vector<Vec2>& seeds, size_t i, const Polygon& frame) {
  std::vector<std::pair<double, size_t>> order;
  order.reserve(seeds.size() - 1);
  for (size_t j = 0; j < seeds.size(); ++j)
    if (j != i) order.emplace_back((seeds[j] - seeds[i]).squaredNorm(), j);
  std::sort(order.begin(), order.end());

  Polygon cell = frame;
  double radius2 = 0.0;
  for (const auto& v : cell) radius2 = std::max(radius2, (v - seeds[i]).squaredNorm());
  for (const auto& [d2, j] : order) {
    if (d2 > 4.0 * radius2) break;
    const Vec2 mid = 0.5 * (seeds[i] + seeds[j]);
    const Vec2 n = seeds[j] - seeds[i];
    cell = clip_halfplane(cell, mid, n);
    if (cell.size() < 3) return {};
    radius2 = 0.0;
    for (const auto& v : cell) radius2 = std::max(radius2, (v - seeds[i]).squaredNorm());
  }
  return cell;
}

std::vector<Polygon> cell_in_domain(const Polygon& cell, const Domain& dom, bool plain_rect,
                                    double area_tol) {
  if (cell.size() < 3) return {};
  if (plain_rect) return {cell};
  return polygon_domain_intersection(cell, dom, area_tol);
}

std::vector<Polygon> voronoi_polygons(const Domain& dom, const MeshSpec& spec) {
  Vec2 lo, hi;
  dom.bbox(lo, hi);
  const Polygon frame = bbox_rect(lo, hi);
  const bool plain_rect =
      dom.holes.empty() && dom.outer.size() == 4 &&
      std::abs(polygon_area(dom.outer) - (hi - lo).prod()) < 1e-12 * (hi - lo).prod();
  const double area_tol = 1e-14 * dom.area();

  std::mt19937_64 rng(spec.rng_seed);
  std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y());
  std::vector<Vec2> seeds;
  while (int(seeds.size()) < spec.n_seeds) {
    const Vec2 p(ux(rng), uy(rng));
    if (dom.contains(p)) seeds.push_back(p);
  }

  for (int it = 0; it < spec.lloyd_iters; ++it) {
    std::vector<Vec2> next = seeds;
    for (size_t i = 0; i < seeds.size(); ++i) {
      const Polygon cell = raw_voronoi_cell(seeds, i, frame);
      const auto pieces = cell_in_domain(cell, dom, plain_rect, area_tol);
      if (pieces.empty()) continue;
      // Move to the centroid of the piece holding the seed (largest otherwise).
      const Polygon* best = &pieces[0];
      double best_area = polygon_area(pieces[0]);
      for (const auto& p : pieces) {
        if (point_in_polygon(seeds[i], p)) {
          best = &p;
          break;
        }
        const double a = polygon_area(p);
        if (a > best_area) {
          best = &p;
          best_area = a;
        }
      }
      const Vec2 c = polygon_centroid(*best);
      if (dom.contains(c)) next[i] = c;
    }
    seeds.swap(next);
  }

  std::vector<Polygon> polys;
  for (size_t i = 0; i < seeds.size(); ++i) {
    const Polygon cell = raw_voronoi_cell(seeds, i, frame);
    for (auto& p : cell_in_domain(cell, dom, plain_rect, area_tol)) polys.push_back(std::move(p));
  }
  return polys;
}

std::vector<Polygon> grid_polygons(const Domain& dom, double h, const Vec2& align,
                                   const Vec2& box_lo, const Vec2& box_hi, bool snap_to_align) {
  // Lattice lines sit at align + (k + 1/2) h so `align` is a cell center.
  Vec2 lo = box_lo, hi = box_hi;
  int nx, ny;
  Vec2 origin;
  if (snap_to_align) {
    const auto snap_lo = [&](double v, double a) {
      return a + (std::floor((v - a) / h - 0.5)) * h + 0.5 * h;
    };
    const auto snap_hi = [&](double v, double a) {
      return a + (std::ceil((v - a) / h - 0.5)) * h + 0.5 * h;
    };
    origin = Vec2(snap_lo(lo.x(), align.x()), snap_lo(lo.y(), align.y()));
    hi = Vec2(snap_hi(hi.x(), align.x()), snap_hi(hi.y(), align.y()));
    nx = std::max(1, int(std::lround((hi.x() - origin.x()) / h)));
    ny = std::max(1, int(std::lround((hi.y() - origin.y()) / h)));
  } else {
    origin = lo;
    nx = std::max(1, int(std::lround((hi.x() - lo.x()) / h)));
    ny = std::max(1, int(std::lround((hi.y() - lo.y()) / h)));
  }
  const double hx = (hi.x() - origin.x()) / nx;
  const double hy = (hi.y() - origin.y()) / ny;
  const double area_tol = 1e-10 * hx * hy;

  std::vector<Polygon> polys;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      Polygon cell = {Vec2(origin.x() + i * hx, origin.y() + j * hy),
                      Vec2(origin.x() + (i + 1) * hx, origin.y() + j * hy),
                      Vec2(origin.x() + (i + 1) * hx, origin.y() + (j + 1) * hy),
                      Vec2(origin.x() + i * hx, origin.y() + (j + 1) * hy)};
      for (auto& p : polygon_domain_intersection(cell, dom, area_tol)) polys.push_back(std::move(p));
    }
  }
  return polys;
}

void stitch_hanging_nodes(PolyMesh& m, double tol) {
  // Bin nodes for segment range queries.
  Vec2 lo(1e300, 1e300), hi = -lo;
  for (const auto& v : m.nodes) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double bin = std::max((hi - lo).maxCoeff() / 256.0, 10.0 * tol);
  std::unordered_map<std::int64_t, std::vector<int>> bins;
  const auto key = [](std::int64_t ix, std::int64_t iy) {
    return ix * 73856093LL ^ iy * 19349663LL;
  };
  const auto bx = [&](double v) { return std::int64_t(std::floor(v / bin)); };
  for (int i = 0; i < m.n_nodes(); ++i)
    bins[key(bx(m.nodes[size_t(i)].x()), bx(m.nodes[size_t(i)].y()))].push_back(i);

  for (auto& ring : m.elems) {
    for (size_t e = 0; e < ring.size();) {
      const int a = ring[e];
      const int b = ring[(e + 1) % ring.size()];
      const Vec2& pa = m.nodes[size_t(a)];
      const Vec2& pb = m.nodes[size_t(b)];
      std::vector<std::pair<double, int>> found;
      const Vec2 elo = pa.cwiseMin(pb) - Vec2(tol, tol);
      const Vec2 ehi = pa.cwiseMax(pb) + Vec2(tol, tol);
      for (std::int64_t ix = bx(elo.x()); ix <= bx(ehi.x()); ++ix)
        for (std::int64_t iy = bx(elo.y()); iy <= bx(ehi.y()); ++iy) {
          auto it = bins.find(key(ix, iy));
          if (it == bins.end()) continue;
          const double len = (pb - pa).norm();
          for (int c : it->second) {
            if (c == a || c == b) continue;
            double t = 0.0;
            // Nodes within 2 tol of an endpoint are near-coincident roundoff
            // twins, not hanging nodes; inserting them would create degenerate
            // edges.
            if (segment_distance(m.nodes[size_t(c)], pa, pb, &t) < tol && t * len > 2.0 * tol &&
                (1.0 - t) * len > 2.0 * tol)
              found.emplace_back(t, c);
          }
        }
      if (found.empty()) {
        ++e;
        continue;
      }
      std::sort(found.begin(), found.end());
      std::vector<int> ins;
      for (const auto& [t, c] : found) {
        (void)t;
        if (std::find(ring.begin(), ring.end(), c) == ring.end()) ins.push_back(c);
      }
      ring.insert(ring.begin() + long(e) + 1, ins.begin(), ins.end());
      e += ins.size() + 1;
    }
  }
}

}  // namespace

PolyMesh generate_mesh(const Domain& dom, const MeshSpec& spec) {
  std::vector<Polygon> polys;
  Vec2 dlo, dhi;
  dom.bbox(dlo, dhi);
  const double diam = (dhi - dlo).norm();

  if (spec.n_seeds > 0) {
    polys = voronoi_polygons(dom, spec);
  } else if (spec.grid_cell > 0.0) {
    polys = grid_polygons(dom, spec.grid_cell, Vec2::Zero(), dlo, dhi, false);
  } else {
    throw std::runtime_error("mesh spec selects neither seeds nor grid");
  }

  if (spec.refine) {
    const RefineZone& rz = *spec.refine;
    const auto grid =
        grid_polygons(dom, rz.cell_size, rz.align, rz.lo, rz.hi, true);
    // The snapped grid hull replaces every coarse polygon it overlaps.
    Vec2 glo(1e300, 1e300), ghi = -glo;
    for (const auto& g : grid) {
      Vec2 l, h;
      polygon_bbox(g, l, h);
      glo = glo.cwiseMin(l);
      ghi = ghi.cwiseMax(h);
    }
    const Polygon box = bbox_rect(glo, ghi);
    std::vector<Polygon> kept;
    for (auto& p : polys) {
      Vec2 l, h;
      polygon_bbox(p, l, h);
      if (h.x() <= glo.x() || l.x() >= ghi.x() || h.y() <= glo.y() || l.y() >= ghi.y()) {
        kept.push_back(std::move(p));
        continue;
      }
      for (auto& piece : polygon_difference(p, box, 1e-12 * polygon_area(p)))
        kept.push_back(std::move(piece));
    }
    polys = std::move(kept);
    polys.insert(polys.end(), grid.begin(), grid.end());
  }

  PolyMesh m;
  // Vertices meant to coincide agree to roundoff; keep the weld radius tight
  // so nothing genuinely distinct is merged and tiling area is preserved.
  Welder welder{1e-12 * diam, {}, {}};
  for (const auto& p : polys) {
    std::vector<int> ring;
    for (const auto& v : p) {
      const int id = welder.add(v);
      if (ring.empty() || ring.back() != id) ring.push_back(id);
    }
    while (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
    if (ring.size() >= 3) m.elems.push_back(std::move(ring));
  }
  m.nodes = std::move(welder.nodes);

  stitch_hanging_nodes(m, 1e-9 * diam);

  // Compact away nodes not referenced by any ring.
  std::vector<int> remap(m.nodes.size(), -1);
  std::vector<Vec2> packed;
  for (auto& ring : m.elems)
    for (int& i : ring) {
      if (remap[size_t(i)] < 0) {
        remap[size_t(i)] = int(packed.size());
        packed.push_back(m.nodes[size_t(i)]);
      }
      i = remap[size_t(i)];
    }
  m.nodes = std::move(packed);
  return m;
}

}  // namespace polyxfem
