#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polyxfem/solver.hpp"

namespace polyxfem {

// Axis-aligned box selector over node coordinates; an edge needs both
// endpoints inside. Boxes may extend past the domain.
struct SetSpec {
  std::string name;
  Vec2 lo{0, 0}, hi{0, 0};
};

struct TearingSpec {
  bool equibiaxial = false;
  double c = 0;  // reference crack length of the 2 k W c estimate
};

// One batch run: geometry, discretization, material, load program, outputs.
// Serialized as versioned JSON; see docs in the repository root.
struct RunConfig {
  int config_version = 1;
  std::string name = "run";

  Domain domain;
  std::vector<Vec2> crack;  // polyline, empty for uncracked runs

  MeshSpec mesh;
  Material material;
  XfemParams xfem;
  SolveParams solve;

  std::vector<SetSpec> node_sets;
  std::vector<SetSpec> edge_sets;
  std::vector<DirichletBC> dirichlet;
  std::vector<TractionBC> tractions;

  std::vector<double> j_radius_factors;  // r_J = factor * sqrt(tip element area)
  bool sif = false;                      // interaction-integral mode split (small strain)
  std::optional<TearingSpec> tearing;

  bool vtk = true;
  int vtk_every = 1;
};

// Throws std::runtime_error with a location-anchored message on syntax or
// schema violations.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

// Semantic checks that do not need the mesh: version, model parameters, load
// program, set references, crack-vs-refinement consistency. Returns messages;
// empty means valid.
std::vector<std::string> validate_config(const RunConfig& cfg);

}  // namespace polyxfem
