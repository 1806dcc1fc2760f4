#include "polyxfem/vtk.hpp"

#include <fstream>
#include <stdexcept>

namespace polyxfem {

namespace {

void write_cell_scalar(std::ofstream& out, const std::string& name,
                       const std::vector<double>& vals) {
  out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
  for (double v : vals) out << v << "\n";
}

}  // namespace

void write_vtk(const PolyMesh& mesh, const std::string& path, const VtkFields* fields) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.precision(12);

  out << "# vtk DataFile Version 3.0\n";
  out << "polyxfem\n";
  out << "ASCII\n";
  out << "DATASET POLYDATA\n";
  out << "POINTS " << mesh.n_nodes() << " double\n";
  for (int j = 0; j < mesh.n_nodes(); ++j) {
    Vec2 x = mesh.nodes[size_t(j)];
    if (fields) x += fields->displacement[size_t(j)];
    out << x.x() << " " << x.y() << " 0\n";
  }

  size_t list_len = 0;
  for (const auto& ring : mesh.elems) list_len += ring.size() + 1;
  out << "POLYGONS " << mesh.n_elems() << " " << list_len << "\n";
  for (const auto& ring : mesh.elems) {
    out << ring.size();
    for (int j : ring) out << " " << j;
    out << "\n";
  }

  if (!fields) return;

  out << "POINT_DATA " << mesh.n_nodes() << "\n";
  out << "VECTORS displacement double\n";
  for (const auto& d : fields->displacement) out << d.x() << " " << d.y() << " 0\n";

  out << "CELL_DATA " << mesh.n_elems() << "\n";
  std::vector<double> comp(size_t(mesh.n_elems()));
  const char* names[3] = {"sigma_xx", "sigma_yy", "sigma_xy"};
  const int ij[3][2] = {{0, 0}, {1, 1}, {0, 1}};
  for (int c = 0; c < 3; ++c) {
    for (int e = 0; e < mesh.n_elems(); ++e)
      comp[size_t(e)] = fields->cell_sigma[size_t(e)](ij[c][0], ij[c][1]);
    write_cell_scalar(out, names[c], comp);
  }
  write_cell_scalar(out, "sigma_zz", fields->cell_sigma_zz);
  write_cell_scalar(out, "von_mises", fields->cell_von_mises);
  write_cell_scalar(out, "volume_ratio", fields->cell_volume_ratio);
}

}  // namespace polyxfem
