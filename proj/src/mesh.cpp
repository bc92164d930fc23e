#include "growsim/mesh.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "growsim/hex8.hpp"

namespace growsim {

const std::vector<int>& Mesh::node_set(const std::string& name) const {
  const auto it = node_sets.find(name);
  if (it == node_sets.end()) {
    throw std::invalid_argument("Mesh: unknown node set '" + name + "'");
  }
  return it->second;
}

int Mesh::nearest_node(const std::array<double, 3>& x) const {
  int best = 0;
  double best_d = 1e300;
  for (int n = 0; n < num_nodes(); ++n) {
    const double dx = nodes[n][0] - x[0];
    const double dy = nodes[n][1] - x[1];
    const double dz = nodes[n][2] - x[2];
    const double d = dx * dx + dy * dy + dz * dz;
    if (d < best_d) {
      best_d = d;
      best = n;
    }
  }
  return best;
}

namespace {

constexpr double kGridEps = 1e-9;

Mesh structured_grid(const std::vector<double>& xs, const std::vector<double>& ys,
                     const std::vector<double>& zs) {
  Mesh m;
  const int nx = static_cast<int>(xs.size()) - 1;
  const int ny = static_cast<int>(ys.size()) - 1;
  const int nz = static_cast<int>(zs.size()) - 1;
  const auto nid = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };
  m.nodes.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1) * (nz + 1)));
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) m.nodes.push_back({xs[i], ys[j], zs[k]});
  m.elements.reserve(static_cast<std::size_t>(nx * ny * nz));
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        m.elements.push_back({nid(i, j, k), nid(i + 1, j, k), nid(i + 1, j + 1, k),
                              nid(i, j + 1, k), nid(i, j, k + 1), nid(i + 1, j, k + 1),
                              nid(i + 1, j + 1, k + 1), nid(i, j + 1, k + 1)});
      }

  const auto face = [&](int axis, double value) {
    std::vector<int> set;
    for (int n = 0; n < m.num_nodes(); ++n) {
      if (std::abs(m.nodes[static_cast<std::size_t>(n)][static_cast<std::size_t>(axis)] - value) <
          kGridEps)
        set.push_back(n);
    }
    return set;
  };
  m.node_sets["xmin"] = face(0, xs.front());
  m.node_sets["xmax"] = face(0, xs.back());
  m.node_sets["ymin"] = face(1, ys.front());
  m.node_sets["ymax"] = face(1, ys.back());
  m.node_sets["zmin"] = face(2, zs.front());
  m.node_sets["zmax"] = face(2, zs.back());
  return m;
}

std::vector<double> uniform_axis(int n, double length) {
  std::vector<double> v(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) v[static_cast<std::size_t>(i)] = length * i / n;
  return v;
}

// geometric grading; bias = size of last cell / size of first cell
std::vector<double> graded_axis(int n, double length, double bias) {
  std::vector<double> v(static_cast<std::size_t>(n) + 1);
  const double r = std::pow(bias, 1.0 / (n - 1));
  double h0;
  if (std::abs(r - 1.0) < 1e-12) {
    h0 = length / n;
  } else {
    h0 = length * (1.0 - r) / (1.0 - std::pow(r, n));
  }
  double x = 0.0, h = h0;
  v[0] = 0.0;
  for (int i = 1; i <= n; ++i) {
    x += h;
    v[static_cast<std::size_t>(i)] = x;
    h *= r;
  }
  v[static_cast<std::size_t>(n)] = length;  // kill accumulation error
  return v;
}

void verify_jacobians(const Mesh& m, const char* who) {
  const double jmin = min_reference_jacobian(m);
  if (!(jmin > 0.0)) {
    std::ostringstream os;
    os << who << ": non-positive reference Jacobian " << jmin;
    throw std::runtime_error(os.str());
  }
}

}  // namespace

Mesh build_block_mesh(int nx, int ny, int nz, double lx, double ly, double lz) {
  if (nx < 1 || ny < 1 || nz < 1) throw std::invalid_argument("build_block_mesh: counts >= 1");
  if (!(lx > 0.0 && ly > 0.0 && lz > 0.0))
    throw std::invalid_argument("build_block_mesh: lengths > 0");
  Mesh m = structured_grid(uniform_axis(nx, lx), uniform_axis(ny, ly), uniform_axis(nz, lz));

  m.node_sets["P1"] = {m.nearest_node({lx, ly, lz})};
  if (nz % 2 == 0) {
    const int p2 = m.nearest_node({lx, ly, 0.5 * lz});
    if (std::abs(m.nodes[static_cast<std::size_t>(p2)][2] - 0.5 * lz) < kGridEps) {
      m.node_sets["P2"] = {p2};
    }
  }
  verify_jacobians(m, "build_block_mesh");
  return m;
}

Mesh build_stripe_mesh(int level) {
  if (level < 0 || level > 4) throw std::invalid_argument("build_stripe_mesh: level in 0..4");
  // divisions tuned to hit the published element counts exactly
  static const int divs[5][3] = {{4, 6, 15}, {4, 6, 17}, {5, 6, 15}, {5, 8, 25}, {6, 10, 50}};
  const int nx = divs[level][0], ny = divs[level][1], nz = divs[level][2];
  const double thickness = 2.0, half_width = 2.0, half_length = 8.0;

  // fine toward the free edge y = 2 and toward the clamp z = 0
  const std::vector<double> ys = graded_axis(ny, half_width, 1.0 / 2.5);
  const std::vector<double> zs = graded_axis(nz, half_length, 4.0);
  Mesh m = structured_grid(uniform_axis(nx, thickness), ys, zs);
  m.node_sets["clamp"] = m.node_sets["zmin"];
  m.node_sets["symy"] = m.node_sets["ymin"];
  m.node_sets["symz"] = m.node_sets["zmax"];
  m.node_sets["xfix"] = m.node_sets["xmin"];
  m.node_sets["P1"] = {m.nearest_node({0.0, 0.0, half_length})};
  verify_jacobians(m, "build_stripe_mesh");
  return m;
}

double min_reference_jacobian(const Mesh& mesh) {
  double jmin = 1e300;
  for (const auto& el : mesh.elements) {
    std::array<std::array<double, 3>, 8> coords;
    for (int a = 0; a < 8; ++a) coords[static_cast<std::size_t>(a)] = mesh.nodes[static_cast<std::size_t>(el[static_cast<std::size_t>(a)])];
    for (const auto& xi : hex8_gauss_points()) {
      const ShapeHex8 sh = shape_hex8(xi);
      Tensor2 j;
      for (int a = 0; a < 8; ++a)
        for (int i = 0; i < 3; ++i)
          for (int d = 0; d < 3; ++d)
            j(i, d) += coords[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] *
                       sh.grad[static_cast<std::size_t>(a)][static_cast<std::size_t>(d)];
      jmin = std::min(jmin, det(j));
    }
  }
  return jmin;
}

}  // namespace growsim
