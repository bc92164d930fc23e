#pragma once

#include <stdexcept>
#include <utility>

#include "growsim/tensor.hpp"

// Stress-driven volumetric growth law: homeostatic-surface potential,
// associative flow, Perzyna-type rate, exponential-map integration of the
// growth right Cauchy-Green tensor, and the algorithmically consistent
// tangent. All functions are pure; per-point state is owned by the caller.

namespace growsim {

namespace tol {
inline constexpr double local_tol = 1e-10;       // combined local residual norm
inline constexpr int local_max_iter = 50;
inline constexpr double fd_rel_step = 1e-7;      // central differences, relative
inline constexpr double skew_warn = 1e-8;        // r_g asymmetry monitor
}  // namespace tol

struct GrowthParams {
  double mu = 0.0;        // shear modulus [N/mm^2]
  double lambda = 0.0;    // Lame constant [N/mm^2]
  double kappa_g = 0.0;   // growth stiffness [N/mm^2]
  double m = 0.0;         // potential shape factor [-], m > 0, m != 1
  double sigma_g = 0.0;   // homeostatic stress scale [N/mm^2]
  double eta = 0.0;       // growth relaxation time [s]
  double nu = 1.0;        // rate nonlinearity exponent [-]

  // Throws std::invalid_argument on violation.
  void validate() const;
};

struct LocalReport {
  int iterations = 0;
  double residual_norm_final = 0.0;
  double delta_lambda = 0.0;
  bool converged = false;
  double max_skew = 0.0;  // largest r_g asymmetry seen before symmetrization
};

struct GrowthState {
  SymVoigt6 ug_inv = SymVoigt6::identity();  // inverse growth stretch U_g^-1
  double lambda_acc = 0.0;                   // accumulated growth multiplier, signed
  LocalReport last_report{};

  static GrowthState virgin() { return GrowthState{}; }
};

struct DrivingForces {
  Tensor2 s_pk2;      // second Piola-Kirchhoff stress S, symmetric
  Tensor2 x_back;     // back stress X, symmetric
  Tensor2 gamma_m;    // Gamma = Cg^-1 C S, generally nonsymmetric
  Tensor2 sigma_drv;  // Sigma = Gamma - X
};

struct MaterialResponse {
  SymVoigt6 stress;
  Tangent66 tangent;  // dS/dE, engineering Voigt columns
  GrowthState state_new;
  double potential_value = 0.0;
  double dissipation_increment = 0.0;
};

struct LocalSolveFailure : std::runtime_error {
  LocalSolveFailure(const std::string& msg, LocalReport r)
      : std::runtime_error(msg), report(r) {}
  LocalReport report;
};

// psi_e = mu/2 (tr Ce - 3) - mu ln Je + lambda/4 (Je^2 - 1 - 2 ln Je)
double elastic_energy(const Tensor2& c, const Tensor2& cg, const GrowthParams& p);

// psi_g = kappa_g/2 (Jg^2 - 1 - 2 ln Jg)
double growth_energy(const Tensor2& cg, const GrowthParams& p);

// S = mu (Cg^-1 - C^-1) + lambda/2 ((J/Jg)^2 - 1) C^-1
Tensor2 pk2_stress(const Tensor2& c, const Tensor2& cg, const GrowthParams& p);

// X = kappa_g (Jg^2 - 1) Cg^-1
Tensor2 back_stress(const Tensor2& cg, const GrowthParams& p);

DrivingForces driving_forces(const Tensor2& c, const Tensor2& cg, const GrowthParams& p);

// I1 = tr(Sigma Cg), J2 = 1/2 tr(dev(Sigma Cg)^2)
std::pair<double, double> invariants(const Tensor2& sigma_drv, const Tensor2& cg);

// Phi = 3 J2 - (1 - m) sigma_g I1 - m sigma_g^2
double potential(double i1, double j2, const GrowthParams& p);

struct FlowTensors {
  double n_norm = 0.0;  // Frobenius norm of the growth direction N
  Tensor2 f;            // flow tensor, dCg/dt = dlam/dt * f
};

// A = 3 dev(Sigma Cg) - (1-m) sigma_g I; |N|^2 = tr(A Cg^-1 A^T Cg); f = (2/|N|) Cg A
FlowTensors flow_tensors(const Tensor2& sigma_drv, const Tensor2& cg, const GrowthParams& p);

// r_g = -Cg_n^-1 + Ui exp(dlam Ui f Ui) Ui (symmetrized), with Ui the trial U_g^-1;
// r_phi = Phi - m sigma_g^2 sign(dlam) |eta dlam / dt|^nu
std::pair<SymVoigt6, double> local_residuals(const Tensor2& ug_inv_trial, double delta_lambda,
                                             const Tensor2& c, const GrowthState& state_n,
                                             const GrowthParams& p, double dt);

// Newton on (U_g^-1 voigt, dlam); converged when
// |r_g|_F + |r_phi|/(m sigma_g^2) < local_tol. Throws LocalSolveFailure.
std::pair<GrowthState, LocalReport> local_solve(const Tensor2& c, const GrowthState& state_n,
                                                const GrowthParams& p, double dt);

// Algorithmic tangent 2(dS/dC|_Ug + dS/dUg : dUg/dC) in engineering Voigt columns,
// internal-variable sensitivity from the converged local Jacobian.
Tangent66 consistent_tangent(const Tensor2& c, const GrowthState& state_n,
                             const GrowthState& converged, const GrowthParams& p, double dt);

// Max relative discrepancy between tr((CS)^a), tr((F S F^T)^a) and tr(M^a),
// a = 1..3, with M = Ug^-1 C S Ug.
double mandel_invariant_check(const Tensor2& f_total, const Tensor2& c, const Tensor2& cg,
                              const GrowthParams& p);

// Sigma : 1/2 (Cg_new - Cg_old); diagnostic only, sign not asserted.
double dissipation_increment(const Tensor2& sigma_drv, const Tensor2& cg_old,
                             const Tensor2& cg_new);

// Single entry point for the element layer: local solve, stress, tangent,
// potential and dissipation increment. dt = 0 gives the pure elastic response.
MaterialResponse update_material_point(const SymVoigt6& c, const GrowthState& state_n,
                                       const GrowthParams& p, double dt);

}  // namespace growsim
