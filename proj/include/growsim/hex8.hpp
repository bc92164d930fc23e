#pragma once

#include <array>
#include <stdexcept>
#include <variant>

#include "growsim/growth_law.hpp"
#include "growsim/iso_growth.hpp"
#include "growsim/tensor.hpp"

// Trilinear hexahedron with full 2x2x2 Gauss quadrature: shape functions,
// material dispatch and the total-Lagrangian element force/stiffness kernel.

namespace growsim {

struct ShapeHex8 {
  std::array<double, 8> value{};
  std::array<std::array<double, 3>, 8> grad{};  // d/dxi
};

ShapeHex8 shape_hex8(const std::array<double, 3>& xi);

// 2x2x2 Gauss abscissae (weights are all 1)
const std::array<std::array<double, 3>, 8>& hex8_gauss_points();

struct Material {
  std::variant<GrowthParams, IsoParams> law;

  bool is_growth() const { return std::holds_alternative<GrowthParams>(law); }
};

using PointState = std::variant<GrowthState, IsoState>;

struct PointResponse {
  SymVoigt6 stress;
  Tangent66 tangent;
  PointState state_new;
  double phi = 0.0;       // growth potential or iso driving force
  double aux = 0.0;       // delta lambda (growth) or theta (iso)
  double diss = 0.0;      // dissipation increment diagnostic
};

// Material-point update behind one dispatch point for the element layer.
PointResponse update_point(const SymVoigt6& c, const PointState& state, const Material& mat,
                           double dt);

PointState initial_point_state(const Material& mat);

// Reference geometry of one element at one Gauss point.
struct GpGeometry {
  std::array<std::array<double, 3>, 8> grad_x{};  // shape gradients wrt X
  double weight = 0.0;                            // Gauss weight times det J0
};

std::array<GpGeometry, 8> element_reference_geometry(
    const std::array<std::array<double, 3>, 8>& coords);

struct ElementInversion : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ElementResult {
  std::array<double, 24> f_int{};
  std::array<double, 576> k{};  // 24x24 row-major
  std::array<PointState, 8> new_states;
  std::array<double, 8> gp_phi{};
  std::array<double, 8> gp_aux{};
  std::array<double, 8> gp_diss{};
};

// Total-Lagrangian internal force and tangent stiffness (material plus
// geometric part) with 8-point quadrature. Throws ElementInversion when
// det F <= 0 at any Gauss point; local solve failures propagate.
ElementResult element_force_stiffness(const std::array<GpGeometry, 8>& geo,
                                      const std::array<std::array<double, 3>, 8>& nodal_u,
                                      const std::array<PointState, 8>& gp_states,
                                      const Material& mat, double dt);

// Deformation gradient at one Gauss point from nodal displacements.
Tensor2 deformation_gradient(const GpGeometry& gp,
                             const std::array<std::array<double, 3>, 8>& nodal_u);

}  // namespace growsim
