#include "polyxfem/polymesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace polyxfem {

Polygon PolyMesh::element_polygon(int e) const {
  Polygon p;
  for (int i : elems[size_t(e)]) p.push_back(nodes[size_t(i)]);
  return p;
}

double PolyMesh::element_diameter(int e) const { return polygon_diameter(element_polygon(e)); }

double PolyMesh::element_area(int e) const { return polygon_area(element_polygon(e)); }

double PolyMesh::total_area() const {
  double a = 0.0;
  for (int e = 0; e < n_elems(); ++e) a += element_area(e);
  return a;
}

std::vector<std::array<int, 2>> PolyMesh::boundary_edges() const {
  std::map<std::pair<int, int>, int> count;
  for (const auto& ring : elems) {
    const size_t n = ring.size();
    for (size_t i = 0; i < n; ++i) {
      int a = ring[i], b = ring[(i + 1) % n];
      count[{std::min(a, b), std::max(a, b)}]++;
    }
  }
  std::vector<std::array<int, 2>> out;
  for (const auto& ring : elems) {
    const size_t n = ring.size();
    for (size_t i = 0; i < n; ++i) {
      int a = ring[i], b = ring[(i + 1) % n];
      if (count[{std::min(a, b), std::max(a, b)}] == 1) out.push_back({a, b});
    }
  }
  return out;
}

std::vector<std::vector<int>> PolyMesh::node_supports() const {
  std::vector<std::vector<int>> sup(nodes.size());
  for (int e = 0; e < n_elems(); ++e)
    for (int i : elems[size_t(e)]) sup[size_t(i)].push_back(e);
  return sup;
}

void PolyMesh::audit() const {
  std::map<std::pair<int, int>, int> edge_count;
  std::vector<char> used(nodes.size(), 0);
  for (int e = 0; e < n_elems(); ++e) {
    const auto& ring = elems[size_t(e)];
    if (ring.size() < 3) throw std::runtime_error("element with fewer than 3 nodes");
    const Polygon p = element_polygon(e);
    if (polygon_area(p) <= 0.0) throw std::runtime_error("non-positive element area");
    const size_t n = ring.size();
    for (size_t i = 0; i < n; ++i) {
      int a = ring[i], b = ring[(i + 1) % n];
      if (a == b) throw std::runtime_error("repeated consecutive node in ring");
      used[size_t(a)] = 1;
      edge_count[{std::min(a, b), std::max(a, b)}]++;
    }
  }
  for (const auto& [edge, c] : edge_count) {
    (void)edge;
    if (c > 2) throw std::runtime_error("edge shared by more than two elements");
  }
  for (size_t i = 0; i < nodes.size(); ++i)
    if (!used[i]) throw std::runtime_error("orphan node");

  // Conformity: a node within tolerance of an element edge must belong to
  // that element's ring.
  double diam = 0.0;
  for (int e = 0; e < n_elems(); ++e) diam = std::max(diam, element_diameter(e));
  const double tol = 1e-9 * diam;
  for (int e = 0; e < n_elems(); ++e) {
    const auto& ring = elems[size_t(e)];
    const size_t n = ring.size();
    Vec2 lo, hi;
    polygon_bbox(element_polygon(e), lo, hi);
    for (size_t i = 0; i < nodes.size(); ++i) {
      const Vec2& x = nodes[i];
      if (x.x() < lo.x() - tol || x.x() > hi.x() + tol || x.y() < lo.y() - tol ||
          x.y() > hi.y() + tol)
        continue;
      for (size_t k = 0; k < n; ++k) {
        int a = ring[k], b = ring[(k + 1) % n];
        if (int(i) == a || int(i) == b) continue;
        const Vec2& pa = nodes[size_t(a)];
        const Vec2& pb = nodes[size_t(b)];
        // Near-coincident roundoff twins of an endpoint are not hanging nodes.
        if ((x - pa).norm() < 2.0 * tol || (x - pb).norm() < 2.0 * tol) continue;
        const double d = segment_distance(x, pa, pb);
        if (d < tol) {
          const bool member = std::find(ring.begin(), ring.end(), int(i)) != ring.end();
          if (!member) throw std::runtime_error("hanging node not absorbed into ring");
        }
      }
    }
  }
}

void write_polymesh(const PolyMesh& m, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os.precision(17);
  os << "POLYMESH 1\n";
  os << "NODES " << m.n_nodes() << "\n";
  for (const auto& v : m.nodes) os << v.x() << " " << v.y() << "\n";
  os << "ELEMS " << m.n_elems() << "\n";
  for (const auto& ring : m.elems) {
    os << ring.size();
    for (int i : ring) os << " " << i;
    os << "\n";
  }
  for (const auto& [name, ids] : m.node_sets) {
    os << "SET " << name << " node " << ids.size() << "\n";
    for (int i : ids) os << i << "\n";
  }
  for (const auto& [name, edges] : m.edge_sets) {
    os << "SET " << name << " edge " << edges.size() << "\n";
    for (const auto& e : edges) os << e[0] << " " << e[1] << "\n";
  }
}

PolyMesh read_polymesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string tag;
  int version = 0;
  is >> tag >> version;
  if (tag != "POLYMESH" || version != 1) throw std::runtime_error("bad mesh header");
  PolyMesh m;
  int k = 0;
  is >> tag >> k;
  if (tag != "NODES") throw std::runtime_error("expected NODES");
  m.nodes.resize(size_t(k));
  for (auto& v : m.nodes) is >> v.x() >> v.y();
  is >> tag >> k;
  if (tag != "ELEMS") throw std::runtime_error("expected ELEMS");
  m.elems.resize(size_t(k));
  for (auto& ring : m.elems) {
    int n = 0;
    is >> n;
    ring.resize(size_t(n));
    for (auto& i : ring) is >> i;
  }
  while (is >> tag) {
    if (tag != "SET") throw std::runtime_error("expected SET");
    std::string name, type;
    int count = 0;
    is >> name >> type >> count;
    if (type == "node") {
      auto& ids = m.node_sets[name];
      ids.resize(size_t(count));
      for (auto& i : ids) is >> i;
    } else if (type == "edge") {
      auto& edges = m.edge_sets[name];
      edges.resize(size_t(count));
      for (auto& e : edges) is >> e[0] >> e[1];
    } else {
      throw std::runtime_error("unknown set type " + type);
    }
  }
  return m;
}

}  // namespace polyxfem
