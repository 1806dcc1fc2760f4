#pragma once

#include <string>

#include "polyxfem/polymesh.hpp"

#include <Eigen/Dense>
#include <vector>

namespace polyxfem {

// Per-node displacement plus element-average stress measures.
struct VtkFields {
  std::vector<Vec2> displacement;          // one per node
  std::vector<Eigen::Matrix2d> cell_sigma;  // one per element, Cauchy
  std::vector<double> cell_sigma_zz;
  std::vector<double> cell_von_mises;
  std::vector<double> cell_volume_ratio;
};

// Legacy ASCII polydata. With fields, points carry deformed coordinates and
// the arrays above; without, the undeformed mesh alone.
void write_vtk(const PolyMesh& mesh, const std::string& path, const VtkFields* fields = nullptr);

}  // namespace polyxfem
