#include "growsim/hex8.hpp"

#include <cmath>

namespace growsim {

namespace {
// node local coordinates, right-handed ordering
constexpr double kXi[8][3] = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                              {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};
}  // namespace

ShapeHex8 shape_hex8(const std::array<double, 3>& xi) {
  ShapeHex8 s;
  for (int a = 0; a < 8; ++a) {
    const double gx = kXi[a][0], gy = kXi[a][1], gz = kXi[a][2];
    const double fx = 1.0 + gx * xi[0];
    const double fy = 1.0 + gy * xi[1];
    const double fz = 1.0 + gz * xi[2];
    s.value[static_cast<std::size_t>(a)] = 0.125 * fx * fy * fz;
    s.grad[static_cast<std::size_t>(a)] = {0.125 * gx * fy * fz, 0.125 * fx * gy * fz,
                                           0.125 * fx * fy * gz};
  }
  return s;
}

const std::array<std::array<double, 3>, 8>& hex8_gauss_points() {
  static const std::array<std::array<double, 3>, 8> pts = [] {
    std::array<std::array<double, 3>, 8> p;
    const double g = 1.0 / std::sqrt(3.0);
    int n = 0;
    for (int k = 0; k < 2; ++k)
      for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i)
          p[static_cast<std::size_t>(n++)] = {(2 * i - 1) * g, (2 * j - 1) * g, (2 * k - 1) * g};
    return p;
  }();
  return pts;
}

PointResponse update_point(const SymVoigt6& c, const PointState& state, const Material& mat,
                           double dt) {
  PointResponse out;
  if (mat.is_growth()) {
    const auto& p = std::get<GrowthParams>(mat.law);
    const auto& s = std::get<GrowthState>(state);
    const MaterialResponse r = update_material_point(c, s, p, dt);
    out.stress = r.stress;
    out.tangent = r.tangent;
    out.state_new = r.state_new;
    out.phi = r.potential_value;
    out.aux = r.state_new.last_report.delta_lambda;
    out.diss = r.dissipation_increment;
  } else {
    const auto& p = std::get<IsoParams>(mat.law);
    const auto& s = std::get<IsoState>(state);
    if (dt == 0.0) {
      // frozen internal variable: small positive step with growth disabled
      IsoParams frozen = p;
      frozen.k_plus = frozen.k_minus = 0.0;
      const IsoResponse r = iso_update(c, s, frozen, 1.0);
      out.stress = r.stress;
      out.tangent = r.tangent;
      out.state_new = s;
      out.phi = r.phi_value;
      out.aux = s.theta;
      out.diss = 0.0;
      return out;
    }
    const IsoResponse r = iso_update(c, s, p, dt);
    out.stress = r.stress;
    out.tangent = r.tangent;
    out.state_new = r.state_new;
    out.phi = r.phi_value;
    out.aux = r.state_new.theta;
    // Gamma : 1/2 dCg with Cg = theta^2 I
    const double th_old = s.theta, th_new = r.state_new.theta;
    const Tensor2 ct = voigt_unpack(c);
    const Tensor2 st = voigt_unpack(r.stress);
    const Tensor2 gamma = (1.0 / (th_new * th_new)) * (ct * st);
    out.diss = 0.5 * trace(gamma) * (th_new * th_new - th_old * th_old);
  }
  return out;
}

PointState initial_point_state(const Material& mat) {
  if (mat.is_growth()) return GrowthState::virgin();
  return IsoState{1.0};
}

std::array<GpGeometry, 8> element_reference_geometry(
    const std::array<std::array<double, 3>, 8>& coords) {
  std::array<GpGeometry, 8> out;
  int n = 0;
  for (const auto& xi : hex8_gauss_points()) {
    const ShapeHex8 sh = shape_hex8(xi);
    Tensor2 j0;
    for (int a = 0; a < 8; ++a)
      for (int i = 0; i < 3; ++i)
        for (int d = 0; d < 3; ++d)
          j0(i, d) += coords[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] *
                      sh.grad[static_cast<std::size_t>(a)][static_cast<std::size_t>(d)];
    const double detj = det(j0);
    if (!(detj > 0.0)) throw std::runtime_error("element_reference_geometry: det J0 <= 0");
    const Tensor2 j0_inv = invert(j0);
    GpGeometry& gp = out[static_cast<std::size_t>(n++)];
    gp.weight = detj;  // unit Gauss weights
    for (int a = 0; a < 8; ++a)
      for (int i = 0; i < 3; ++i) {
        double g = 0.0;
        for (int d = 0; d < 3; ++d)
          g += j0_inv(d, i) * sh.grad[static_cast<std::size_t>(a)][static_cast<std::size_t>(d)];
        gp.grad_x[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] = g;
      }
  }
  return out;
}

Tensor2 deformation_gradient(const GpGeometry& gp,
                             const std::array<std::array<double, 3>, 8>& nodal_u) {
  Tensor2 f = Tensor2::identity();
  for (int a = 0; a < 8; ++a)
    for (int i = 0; i < 3; ++i)
      for (int d = 0; d < 3; ++d)
        f(i, d) += nodal_u[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] *
                   gp.grad_x[static_cast<std::size_t>(a)][static_cast<std::size_t>(d)];
  return f;
}

ElementResult element_force_stiffness(const std::array<GpGeometry, 8>& geo,
                                      const std::array<std::array<double, 3>, 8>& nodal_u,
                                      const std::array<PointState, 8>& gp_states,
                                      const Material& mat, double dt) {
  ElementResult out;
  for (int q = 0; q < 8; ++q) {
    const GpGeometry& gp = geo[static_cast<std::size_t>(q)];
    const Tensor2 f = deformation_gradient(gp, nodal_u);
    if (!(det(f) > 0.0)) throw ElementInversion("element inverted (det F <= 0)");
    const Tensor2 c = transpose(f) * f;
    const SymVoigt6 cv{{c(0, 0), c(1, 1), c(2, 2), c(0, 1), c(0, 2), c(1, 2)}};

    const PointResponse resp = update_point(cv, gp_states[static_cast<std::size_t>(q)], mat, dt);
    out.new_states[static_cast<std::size_t>(q)] = resp.state_new;
    out.gp_phi[static_cast<std::size_t>(q)] = resp.phi;
    out.gp_aux[static_cast<std::size_t>(q)] = resp.aux;
    out.gp_diss[static_cast<std::size_t>(q)] = resp.diss;

    // B maps nodal displacement increments to engineering GL strain increments
    double b[6][24] = {};
    for (int a = 0; a < 8; ++a) {
      const auto& g = gp.grad_x[static_cast<std::size_t>(a)];
      for (int i = 0; i < 3; ++i) {
        const int col = 3 * a + i;
        b[0][col] = f(i, 0) * g[0];
        b[1][col] = f(i, 1) * g[1];
        b[2][col] = f(i, 2) * g[2];
        b[3][col] = f(i, 0) * g[1] + f(i, 1) * g[0];
        b[4][col] = f(i, 0) * g[2] + f(i, 2) * g[0];
        b[5][col] = f(i, 1) * g[2] + f(i, 2) * g[1];
      }
    }

    const double w = gp.weight;
    for (int col = 0; col < 24; ++col) {
      double fi = 0.0;
      for (int r = 0; r < 6; ++r) fi += b[r][col] * resp.stress[r];
      out.f_int[static_cast<std::size_t>(col)] += w * fi;
    }

    // material part B^T D B
    double db[6][24];
    for (int r = 0; r < 6; ++r)
      for (int col = 0; col < 24; ++col) {
        double v = 0.0;
        for (int s = 0; s < 6; ++s) v += resp.tangent(r, s) * b[s][col];
        db[r][col] = v;
      }
    for (int row = 0; row < 24; ++row)
      for (int col = 0; col < 24; ++col) {
        double v = 0.0;
        for (int r = 0; r < 6; ++r) v += b[r][row] * db[r][col];
        out.k[static_cast<std::size_t>(24 * row + col)] += w * v;
      }

    // geometric part: (grad_a . S grad_b) I3
    const Tensor2 s_t = voigt_unpack(resp.stress);
    for (int a = 0; a < 8; ++a) {
      const auto& ga = gp.grad_x[static_cast<std::size_t>(a)];
      for (int bnode = 0; bnode < 8; ++bnode) {
        const auto& gb = gp.grad_x[static_cast<std::size_t>(bnode)];
        double gsg = 0.0;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) gsg += ga[static_cast<std::size_t>(i)] * s_t(i, j) * gb[static_cast<std::size_t>(j)];
        for (int i = 0; i < 3; ++i)
          out.k[static_cast<std::size_t>(24 * (3 * a + i) + (3 * bnode + i))] += w * gsg;
      }
    }
  }
  return out;
}

}  // namespace growsim
