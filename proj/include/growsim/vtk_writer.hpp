#pragma once

#include <map>
#include <string>
#include <vector>

#include "growsim/mesh.hpp"

namespace growsim {

// Legacy-VTK ASCII unstructured grid snapshot: reference points, hex cells
// (type 12), nodal displacement vectors and per-cell scalar arrays.
void write_vtk(const std::string& path, const Mesh& mesh, const std::vector<double>& displacement,
               const std::map<std::string, std::vector<double>>& cell_scalars);

}  // namespace growsim
