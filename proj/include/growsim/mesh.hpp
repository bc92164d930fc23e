#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

namespace growsim {

// Hex8 mesh with named node sets. Element node ordering is the standard
// right-handed one (bottom quad counter-clockwise, then top quad), so all
// reference Jacobians are positive; the builders verify this.
struct Mesh {
  std::vector<std::array<double, 3>> nodes;       // [mm]
  std::vector<std::array<int, 8>> elements;
  std::map<std::string, std::vector<int>> node_sets;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_elements() const { return static_cast<int>(elements.size()); }
  int num_dofs() const { return 3 * num_nodes(); }

  const std::vector<int>& node_set(const std::string& name) const;
  int nearest_node(const std::array<double, 3>& x) const;
};

// Structured block on [0,lx]x[0,ly]x[0,lz]. Face sets xmin/xmax/ymin/ymax/
// zmin/zmax; probe sets P1 = (lx,ly,lz) and P2 = (lx,ly,lz/2) when that
// point lies on the grid.
Mesh build_block_mesh(int nx, int ny, int nz, double lx, double ly, double lz);

// Quarter model of the clamped stripe (thickness x = 2, half width y = 2,
// half length z = 8, all mm), graded toward the clamped corner at
// (y = 2, z = 0). Levels 0..4 give 360/408/450/1000/3000 elements.
// Sets: clamp (z=0), symy (y=0), symz (z=8), xfix (x=0), plus the face names.
Mesh build_stripe_mesh(int level);

// Smallest reference Jacobian over all elements and Gauss points.
double min_reference_jacobian(const Mesh& mesh);

}  // namespace growsim
