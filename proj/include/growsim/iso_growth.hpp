#pragma once

#include "growsim/tensor.hpp"

// Isotropic comparison model: F_g = theta * I with a scalar growth stretch
// driven by the Mandel stress trace, same compressible Neo-Hookean ground
// model as the potential-based law.

namespace growsim {

struct IsoParams {
  double mu = 0.0;           // [N/mm^2]
  double lambda = 0.0;       // [N/mm^2]
  double m_crit = 0.0;       // homeostatic trace threshold [N/mm^2]
  double k_plus = 0.0;       // expansion speed [1/(N/mm^2 s)]
  double k_minus = 0.0;      // contraction speed
  double theta_plus = 0.0;   // upper stretch bound
  double theta_minus = 0.0;  // lower stretch bound
  double gamma_plus = 0.0;   // shape exponents
  double gamma_minus = 0.0;

  void validate() const;
};

struct IsoState {
  double theta = 1.0;
};

struct IsoResponse {
  SymVoigt6 stress;
  Tangent66 tangent;  // dS/dE, engineering Voigt columns
  IsoState state_new;
  double phi_value = 0.0;  // tr M - M_crit at the converged state
};

// phi = tr M - M_crit with M from Ce = C / theta^2
double iso_phi(const Tensor2& c, double theta, const IsoParams& p);

// k+ ((theta+ - theta)/(theta+ - 1))^gamma+ for phi > 0,
// k- ((theta - theta-)/(1 - theta-))^gamma- for phi < 0, 0 at phi = 0
double growth_velocity(double theta, double phi, const IsoParams& p);

// Backward-Euler update of theta (scalar Newton, bisection fallback on the
// stretch bracket), stress S = theta^-2 * 2 dpsi_e/dCe, tangent by central FD
// over the full update.
IsoResponse iso_update(const SymVoigt6& c, const IsoState& state_n, const IsoParams& p, double dt);

// Second Piola-Kirchhoff stress at a frozen growth stretch.
SymVoigt6 iso_pk2(const Tensor2& c, double theta, const IsoParams& p);

}  // namespace growsim
