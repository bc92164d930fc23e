#include "growsim/vtk_writer.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace growsim {

namespace {
void put(std::ofstream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  os << buf;
}
}  // namespace

void write_vtk(const std::string& path, const Mesh& mesh, const std::vector<double>& displacement,
               const std::map<std::string, std::vector<double>>& cell_scalars) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_vtk: cannot open " + path);
  os << "# vtk DataFile Version 3.0\n";
  os << "growsim snapshot\n";
  os << "ASCII\n";
  os << "DATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_nodes() << " double\n";
  for (const auto& x : mesh.nodes) {
    put(os, x[0]);
    os << ' ';
    put(os, x[1]);
    os << ' ';
    put(os, x[2]);
    os << '\n';
  }
  os << "CELLS " << mesh.num_elements() << ' ' << 9 * mesh.num_elements() << '\n';
  for (const auto& el : mesh.elements) {
    os << 8;
    for (int a = 0; a < 8; ++a) os << ' ' << el[static_cast<std::size_t>(a)];
    os << '\n';
  }
  os << "CELL_TYPES " << mesh.num_elements() << '\n';
  for (int e = 0; e < mesh.num_elements(); ++e) os << "12\n";

  os << "POINT_DATA " << mesh.num_nodes() << '\n';
  os << "VECTORS displacement double\n";
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    put(os, displacement[static_cast<std::size_t>(3 * n)]);
    os << ' ';
    put(os, displacement[static_cast<std::size_t>(3 * n + 1)]);
    os << ' ';
    put(os, displacement[static_cast<std::size_t>(3 * n + 2)]);
    os << '\n';
  }

  if (!cell_scalars.empty()) {
    os << "CELL_DATA " << mesh.num_elements() << '\n';
    for (const auto& [name, values] : cell_scalars) {
      if (static_cast<int>(values.size()) != mesh.num_elements()) {
        throw std::invalid_argument("write_vtk: cell array '" + name + "' has wrong size");
      }
      os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : values) {
        put(os, v);
        os << '\n';
      }
    }
  }
}

}  // namespace growsim
