#pragma once

#include "polyxfem/geom.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace polyxfem {

// Conforming polygonal mesh. Hanging nodes created by local refinement are
// absorbed as ordinary (collinear) ring vertices, so conformity means: every
// node lying on an element edge is a member of that element's ring.
struct PolyMesh {
  std::vector<Vec2> nodes;
  std::vector<std::vector<int>> elems;  // CCW node id rings
  std::map<std::string, std::vector<int>> node_sets;
  std::map<std::string, std::vector<std::array<int, 2>>> edge_sets;

  Polygon element_polygon(int e) const;
  double element_diameter(int e) const;
  double element_area(int e) const;
  double total_area() const;
  int n_nodes() const { return int(nodes.size()); }
  int n_elems() const { return int(elems.size()); }

  // Edges owned by exactly one element, as ordered (CCW) node pairs.
  std::vector<std::array<int, 2>> boundary_edges() const;
  // Elements adjacent to each node (support of the nodal basis function).
  std::vector<std::vector<int>> node_supports() const;

  // Throws std::runtime_error on any violated mesh invariant.
  void audit() const;
};

// Structured refinement zone. The grid is aligned so `align` falls at a cell
// center, which keeps a straight crack through `align` off the grid lines.
struct RefineZone {
  Vec2 lo{0, 0}, hi{0, 0};
  double cell_size = 0;
  Vec2 align{0, 0};
};

struct MeshSpec {
  int n_seeds = 0;        // > 0: centroidal Voronoi coarse mesh
  int lloyd_iters = 100;
  std::uint64_t rng_seed = 1;
  double grid_cell = 0;   // > 0 with n_seeds == 0: uniform grid mesh
  std::optional<RefineZone> refine;
};

PolyMesh generate_mesh(const Domain& dom, const MeshSpec& spec);

// Plain text mesh format:
//   POLYMESH 1 / NODES k / ELEMS m ("n i1 ... in", 0-based) / SET name type count
void write_polymesh(const PolyMesh& m, const std::string& path);
PolyMesh read_polymesh(const std::string& path);

}  // namespace polyxfem
