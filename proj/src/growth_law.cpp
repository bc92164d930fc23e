#include "growsim/growth_law.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace growsim {

void GrowthParams::validate() const {
  const auto fail = [](const std::string& msg) { throw std::invalid_argument("GrowthParams: " + msg); };
  if (!(mu > 0.0)) fail("mu must be > 0");
  if (!(lambda > 0.0)) fail("lambda must be > 0");
  if (!(kappa_g > 0.0)) fail("kappa_g must be > 0");
  if (!(sigma_g > 0.0)) fail("sigma_g must be > 0");
  if (!(eta > 0.0)) fail("eta must be > 0");
  if (!(nu > 0.0)) fail("nu must be > 0");
  if (!(m > 0.0)) fail("m must be > 0");
  if (m == 1.0) fail("m = 1 degenerates to a purely deviatoric potential");
}

namespace {

void require_spd(const Tensor2& x, const char* who) {
  if (!is_spd(x)) {
    std::ostringstream os;
    os << who << ": input tensor not symmetric positive definite";
    throw std::invalid_argument(os.str());
  }
}

double signum(double x) { return (x > 0.0) - (x < 0.0); }

// everything the residual needs from one iterate, no validation
struct Eval {
  Tensor2 cg, cg_inv, ug;  // from the U_g^-1 iterate
  double jg2 = 0.0;
  Tensor2 s, sigma, sc;    // stress, driving force, Sigma*Cg
  double i1 = 0.0, j2 = 0.0, phi = 0.0;
  double n_norm = 0.0;
  Tensor2 f;
};

Eval evaluate(const Tensor2& c, double det_c, const Tensor2& c_inv, const Tensor2& ug_inv,
              const GrowthParams& p) {
  Eval e;
  e.cg_inv = ug_inv * ug_inv;
  e.ug = invert(ug_inv);
  e.cg = e.ug * e.ug;
  const double det_ug = det(e.ug);
  e.jg2 = det_ug * det_ug;

  const double je2 = det_c / e.jg2;
  // S = mu (Cg^-1 - C^-1) + lambda/2 (Je^2 - 1) C^-1
  e.s = p.mu * (e.cg_inv - c_inv) + (0.5 * p.lambda * (je2 - 1.0)) * c_inv;

  const Tensor2 gamma = e.cg_inv * (c * e.s);
  const Tensor2 x = (p.kappa_g * (e.jg2 - 1.0)) * e.cg_inv;
  e.sigma = gamma - x;
  e.sc = e.sigma * e.cg;

  e.i1 = trace(e.sc);
  const Tensor2 d = deviator(e.sc);
  e.j2 = 0.5 * trace(d * d);
  e.phi = 3.0 * e.j2 - (1.0 - p.m) * p.sigma_g * e.i1 - p.m * p.sigma_g * p.sigma_g;

  // A = 3 dev(Sigma Cg) - (1-m) sigma_g I
  Tensor2 a = 3.0 * d;
  const double sph = (1.0 - p.m) * p.sigma_g;
  a(0, 0) -= sph;
  a(1, 1) -= sph;
  a(2, 2) -= sph;

  const Tensor2 pm = a * e.cg_inv;
  const Tensor2 qm = transpose(a) * e.cg;
  double n2 = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) n2 += pm(i, j) * qm(j, i);
  e.n_norm = std::sqrt(std::max(n2, 0.0));
  if (e.n_norm < 1e-12 * p.sigma_g) {
    throw LocalSolveFailure("flow direction degenerate (|N| ~ 0)", LocalReport{});
  }
  e.f = (2.0 / e.n_norm) * (e.cg * a);
  return e;
}

struct ResidualOut {
  SymVoigt6 rg;
  double rphi = 0.0;
  double skew = 0.0;
  Eval eval;
};

ResidualOut residual_at(const Tensor2& ug_inv, double dlam, const Tensor2& c, double det_c,
                        const Tensor2& c_inv, const Tensor2& cgn_inv, const GrowthParams& p,
                        double dt) {
  ResidualOut out;
  out.eval = evaluate(c, det_c, c_inv, ug_inv, p);
  const Tensor2 arg = dlam * (ug_inv * (out.eval.f * ug_inv));
  const Tensor2 rg_full = (ug_inv * (mat_exp(arg) * ug_inv)) - cgn_inv;
  double skew = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) skew = std::max(skew, std::abs(rg_full(i, j) - rg_full(j, i)));
  out.skew = skew;
  const Tensor2 rg_sym = sym(rg_full);
  out.rg = SymVoigt6{{rg_sym(0, 0), rg_sym(1, 1), rg_sym(2, 2), rg_sym(0, 1), rg_sym(0, 2),
                      rg_sym(1, 2)}};
  const double omega = p.m * p.sigma_g * p.sigma_g;
  out.rphi = out.eval.phi - omega * signum(dlam) * std::pow(std::abs(p.eta * dlam / dt), p.nu);
  return out;
}

double rg_frobenius(const SymVoigt6& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] +
                   2.0 * (v[3] * v[3] + v[4] * v[4] + v[5] * v[5]));
}

// dense LU with partial pivoting, n <= 7
template <int N>
void solve_dense(std::array<double, N * N>& a, std::array<double, N>& b) {
  std::array<int, N> piv;
  for (int i = 0; i < N; ++i) piv[i] = i;
  for (int k = 0; k < N; ++k) {
    int imax = k;
    double amax = std::abs(a[piv[k] * N + k]);
    for (int i = k + 1; i < N; ++i) {
      const double v = std::abs(a[piv[i] * N + k]);
      if (v > amax) {
        amax = v;
        imax = i;
      }
    }
    std::swap(piv[k], piv[imax]);
    const double pivval = a[piv[k] * N + k];
    if (pivval == 0.0) throw std::runtime_error("local Jacobian singular");
    for (int i = k + 1; i < N; ++i) {
      const double l = a[piv[i] * N + k] / pivval;
      a[piv[i] * N + k] = l;
      for (int j = k + 1; j < N; ++j) a[piv[i] * N + j] -= l * a[piv[k] * N + j];
    }
  }
  std::array<double, N> y;
  for (int i = 0; i < N; ++i) {
    double s = b[piv[i]];
    for (int j = 0; j < i; ++j) s -= a[piv[i] * N + j] * y[j];
    y[i] = s;
  }
  for (int i = N - 1; i >= 0; --i) {
    double s = y[i];
    for (int j = i + 1; j < N; ++j) s -= a[piv[i] * N + j] * b[j];
    b[i] = s / a[piv[i] * N + i];
  }
}

Tensor2 unpack_iterate(const std::array<double, 7>& z) {
  return voigt_unpack(SymVoigt6{{z[0], z[1], z[2], z[3], z[4], z[5]}});
}

}  // namespace

double elastic_energy(const Tensor2& c, const Tensor2& cg, const GrowthParams& p) {
  require_spd(c, "elastic_energy(c)");
  require_spd(cg, "elastic_energy(cg)");
  const Tensor2 ce = c * invert(cg);
  const double tr_ce = trace(ce);
  const double je2 = det(c) / det(cg);
  const double ln_je = 0.5 * std::log(je2);
  return 0.5 * p.mu * (tr_ce - 3.0) - p.mu * ln_je + 0.25 * p.lambda * (je2 - 1.0 - 2.0 * ln_je);
}

double growth_energy(const Tensor2& cg, const GrowthParams& p) {
  require_spd(cg, "growth_energy");
  const double jg2 = det(cg);
  return 0.5 * p.kappa_g * (jg2 - 1.0 - std::log(jg2));
}

Tensor2 pk2_stress(const Tensor2& c, const Tensor2& cg, const GrowthParams& p) {
  require_spd(c, "pk2_stress(c)");
  require_spd(cg, "pk2_stress(cg)");
  const Tensor2 c_inv = invert(c);
  const Tensor2 cg_inv = invert(cg);
  const double je2 = det(c) / det(cg);
  return p.mu * (cg_inv - c_inv) + (0.5 * p.lambda * (je2 - 1.0)) * c_inv;
}

Tensor2 back_stress(const Tensor2& cg, const GrowthParams& p) {
  require_spd(cg, "back_stress");
  return (p.kappa_g * (det(cg) - 1.0)) * invert(cg);
}

DrivingForces driving_forces(const Tensor2& c, const Tensor2& cg, const GrowthParams& p) {
  DrivingForces d;
  d.s_pk2 = pk2_stress(c, cg, p);
  d.x_back = back_stress(cg, p);
  d.gamma_m = invert(cg) * (c * d.s_pk2);
  d.sigma_drv = d.gamma_m - d.x_back;
  return d;
}

std::pair<double, double> invariants(const Tensor2& sigma_drv, const Tensor2& cg) {
  require_spd(cg, "invariants");
  const Tensor2 sc = sigma_drv * cg;
  const Tensor2 d = deviator(sc);
  return {trace(sc), 0.5 * trace(d * d)};
}

double potential(double i1, double j2, const GrowthParams& p) {
  return 3.0 * j2 - (1.0 - p.m) * p.sigma_g * i1 - p.m * p.sigma_g * p.sigma_g;
}

FlowTensors flow_tensors(const Tensor2& sigma_drv, const Tensor2& cg, const GrowthParams& p) {
  require_spd(cg, "flow_tensors");
  const Tensor2 sc = sigma_drv * cg;
  Tensor2 a = 3.0 * deviator(sc);
  const double sph = (1.0 - p.m) * p.sigma_g;
  a(0, 0) -= sph;
  a(1, 1) -= sph;
  a(2, 2) -= sph;
  const Tensor2 cg_inv = invert(cg);
  const Tensor2 pm = a * cg_inv;
  const Tensor2 qm = transpose(a) * cg;
  double n2 = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) n2 += pm(i, j) * qm(j, i);
  FlowTensors ft;
  ft.n_norm = std::sqrt(std::max(n2, 0.0));
  if (ft.n_norm < 1e-12 * p.sigma_g) {
    throw std::invalid_argument("flow_tensors: degenerate growth direction (|N| ~ 0)");
  }
  ft.f = (2.0 / ft.n_norm) * (cg * a);
  return ft;
}

std::pair<SymVoigt6, double> local_residuals(const Tensor2& ug_inv_trial, double delta_lambda,
                                             const Tensor2& c, const GrowthState& state_n,
                                             const GrowthParams& p, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("local_residuals: dt must be > 0");
  const Tensor2 ug_inv_n = voigt_unpack(state_n.ug_inv);
  const Tensor2 cgn_inv = ug_inv_n * ug_inv_n;
  const auto out = residual_at(ug_inv_trial, delta_lambda, c, det(c), invert(c), cgn_inv, p, dt);
  return {out.rg, out.rphi};
}

std::pair<GrowthState, LocalReport> local_solve(const Tensor2& c, const GrowthState& state_n,
                                                const GrowthParams& p, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("local_solve: dt must be > 0");
  const double det_c = det(c);
  const Tensor2 c_inv = invert(c);
  const Tensor2 ug_inv_n = voigt_unpack(state_n.ug_inv);
  const Tensor2 cgn_inv = ug_inv_n * ug_inv_n;
  const double omega = p.m * p.sigma_g * p.sigma_g;

  std::array<double, 7> z{state_n.ug_inv[0], state_n.ug_inv[1], state_n.ug_inv[2],
                          state_n.ug_inv[3], state_n.ug_inv[4], state_n.ug_inv[5], 0.0};
  LocalReport rep;
  for (int it = 1; it <= tol::local_max_iter; ++it) {
    ResidualOut r;
    try {
      r = residual_at(unpack_iterate(z), z[6], c, det_c, c_inv, cgn_inv, p, dt);
    } catch (const std::exception& e) {
      rep.iterations = it;
      rep.converged = false;
      throw LocalSolveFailure(std::string("local_solve: residual evaluation failed: ") + e.what(),
                              rep);
    }
    rep.iterations = it;
    rep.residual_norm_final = rg_frobenius(r.rg) + std::abs(r.rphi) / omega;
    rep.delta_lambda = z[6];
    rep.max_skew = std::max(rep.max_skew, r.skew);
    if (!std::isfinite(rep.residual_norm_final)) {
      rep.converged = false;
      throw LocalSolveFailure("local_solve: residual not finite", rep);
    }
    if (rep.residual_norm_final < tol::local_tol) {
      rep.converged = true;
      GrowthState next;
      next.ug_inv = SymVoigt6{{z[0], z[1], z[2], z[3], z[4], z[5]}};
      next.lambda_acc = state_n.lambda_acc + z[6];
      next.last_report = rep;
      if (!is_spd(voigt_unpack(next.ug_inv))) {
        rep.converged = false;
        throw LocalSolveFailure("local_solve: converged state not SPD", rep);
      }
      return {next, rep};
    }

    // central-difference Jacobian, then one Newton update
    std::array<double, 49> jac{};
    std::array<double, 7> rhs{r.rg[0], r.rg[1], r.rg[2], r.rg[3], r.rg[4], r.rg[5], r.rphi};
    try {
      for (int k = 0; k < 7; ++k) {
        const double h = tol::fd_rel_step * std::max(std::abs(z[k]), 1.0);
        std::array<double, 7> zp = z, zm = z;
        zp[k] += h;
        zm[k] -= h;
        const auto rp = residual_at(unpack_iterate(zp), zp[6], c, det_c, c_inv, cgn_inv, p, dt);
        const auto rm = residual_at(unpack_iterate(zm), zm[6], c, det_c, c_inv, cgn_inv, p, dt);
        for (int i = 0; i < 6; ++i) jac[i * 7 + k] = (rp.rg[i] - rm.rg[i]) / (2.0 * h);
        jac[6 * 7 + k] = (rp.rphi - rm.rphi) / (2.0 * h);
      }
      solve_dense<7>(jac, rhs);
    } catch (const std::exception& e) {
      rep.converged = false;
      throw LocalSolveFailure(std::string("local_solve: Newton step failed: ") + e.what(), rep);
    }
    for (int k = 0; k < 7; ++k) z[k] -= rhs[k];
  }
  rep.converged = false;
  throw LocalSolveFailure("local_solve: no convergence within iteration limit", rep);
}

namespace {

// dS/d(C voigt slot) at fixed internal state, pair perturbation on off-diagonals
std::array<SymVoigt6, 6> stress_sensitivity_c(const Tensor2& c, const Tensor2& cg_inv, double jg2,
                                              const GrowthParams& p) {
  std::array<SymVoigt6, 6> cols;
  static const int pi[6] = {0, 1, 2, 0, 0, 1};
  static const int pj[6] = {0, 1, 2, 1, 2, 2};
  for (int k = 0; k < 6; ++k) {
    const double h = tol::fd_rel_step * std::max(std::abs(c(pi[k], pj[k])), 1.0);
    Tensor2 cp = c, cm = c;
    cp(pi[k], pj[k]) += h;
    cp(pj[k], pi[k]) = cp(pi[k], pj[k]);
    cm(pi[k], pj[k]) -= h;
    cm(pj[k], pi[k]) = cm(pi[k], pj[k]);
    if (pi[k] == pj[k]) {
      cp(pi[k], pj[k]) = c(pi[k], pj[k]) + h;
      cm(pi[k], pj[k]) = c(pi[k], pj[k]) - h;
    }
    const auto s_of = [&](const Tensor2& cc) {
      const double je2 = det(cc) / jg2;
      const Tensor2 ci = invert(cc);
      return p.mu * (cg_inv - ci) + (0.5 * p.lambda * (je2 - 1.0)) * ci;
    };
    const Tensor2 sp = s_of(cp);
    const Tensor2 sm = s_of(cm);
    for (int i = 0; i < 6; ++i) {
      static const int vi[6] = {0, 1, 2, 0, 0, 1};
      static const int vj[6] = {0, 1, 2, 1, 2, 2};
      cols[k][i] = (sp(vi[i], vj[i]) - sm(vi[i], vj[i])) / (2.0 * h);
    }
  }
  return cols;
}

SymVoigt6 pack_unchecked(const Tensor2& t) {
  return SymVoigt6{{t(0, 0), t(1, 1), t(2, 2), t(0, 1), t(0, 2), t(1, 2)}};
}

}  // namespace

Tangent66 consistent_tangent(const Tensor2& c, const GrowthState& state_n,
                             const GrowthState& converged, const GrowthParams& p, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("consistent_tangent: dt must be > 0");
  const double det_c = det(c);
  const Tensor2 c_inv = invert(c);
  const Tensor2 ug_inv_n = voigt_unpack(state_n.ug_inv);
  const Tensor2 cgn_inv = ug_inv_n * ug_inv_n;
  const double dlam = converged.lambda_acc - state_n.lambda_acc;
  std::array<double, 7> z{converged.ug_inv[0], converged.ug_inv[1], converged.ug_inv[2],
                          converged.ug_inv[3], converged.ug_inv[4], converged.ug_inv[5], dlam};

  // local Jacobian at the converged point
  std::array<double, 49> jac{};
  for (int k = 0; k < 7; ++k) {
    const double h = tol::fd_rel_step * std::max(std::abs(z[k]), 1.0);
    std::array<double, 7> zp = z, zm = z;
    zp[k] += h;
    zm[k] -= h;
    const auto rp = residual_at(unpack_iterate(zp), zp[6], c, det_c, c_inv, cgn_inv, p, dt);
    const auto rm = residual_at(unpack_iterate(zm), zm[6], c, det_c, c_inv, cgn_inv, p, dt);
    for (int i = 0; i < 6; ++i) jac[i * 7 + k] = (rp.rg[i] - rm.rg[i]) / (2.0 * h);
    jac[6 * 7 + k] = (rp.rphi - rm.rphi) / (2.0 * h);
  }

  // dr/dC by pair perturbations of the total deformation
  static const int pi[6] = {0, 1, 2, 0, 0, 1};
  static const int pj[6] = {0, 1, 2, 1, 2, 2};
  std::array<std::array<double, 7>, 6> dr_dc;
  const Tensor2 ug_inv_c = unpack_iterate(z);
  for (int k = 0; k < 6; ++k) {
    const double h = tol::fd_rel_step * std::max(std::abs(c(pi[k], pj[k])), 1.0);
    Tensor2 cp = c, cm = c;
    cp(pi[k], pj[k]) += h;
    cp(pj[k], pi[k]) = cp(pi[k], pj[k]);
    cm(pi[k], pj[k]) -= h;
    cm(pj[k], pi[k]) = cm(pi[k], pj[k]);
    const auto rp = residual_at(ug_inv_c, dlam, cp, det(cp), invert(cp), cgn_inv, p, dt);
    const auto rm = residual_at(ug_inv_c, dlam, cm, det(cm), invert(cm), cgn_inv, p, dt);
    for (int i = 0; i < 6; ++i) dr_dc[k][i] = (rp.rg[i] - rm.rg[i]) / (2.0 * h);
    dr_dc[k][6] = (rp.rphi - rm.rphi) / (2.0 * h);
  }

  // internal-variable sensitivity: solve J * dz = -dr/dC per column
  std::array<std::array<double, 7>, 6> dz_dc;
  for (int k = 0; k < 6; ++k) {
    std::array<double, 49> jcopy = jac;
    std::array<double, 7> rhs = dr_dc[k];
    for (double& v : rhs) v = -v;
    solve_dense<7>(jcopy, rhs);
    dz_dc[k] = rhs;
  }

  // dS/dC at fixed state plus dS/dUg^-1 contracted with the sensitivity
  const Eval ev = evaluate(c, det_c, c_inv, ug_inv_c, p);
  const auto ds_dc = stress_sensitivity_c(c, ev.cg_inv, ev.jg2, p);

  std::array<SymVoigt6, 6> ds_du;  // columns over ug_inv voigt slots
  for (int k = 0; k < 6; ++k) {
    const double h = tol::fd_rel_step * std::max(std::abs(z[k]), 1.0);
    std::array<double, 7> zp = z, zm = z;
    zp[k] += h;
    zm[k] -= h;
    const Eval ep = evaluate(c, det_c, c_inv, unpack_iterate(zp), p);
    const Eval em = evaluate(c, det_c, c_inv, unpack_iterate(zm), p);
    const SymVoigt6 svp = pack_unchecked(sym(ep.s));
    const SymVoigt6 svm = pack_unchecked(sym(em.s));
    for (int i = 0; i < 6; ++i) ds_du[k][i] = (svp[i] - svm[i]) / (2.0 * h);
  }

  Tangent66 t;
  for (int i = 0; i < 6; ++i) {
    for (int k = 0; k < 6; ++k) {
      double v = ds_dc[k][i];
      for (int u = 0; u < 6; ++u) v += ds_du[u][i] * dz_dc[k][u];
      // engineering strain columns: diagonal slots scale by 2
      t(i, k) = (k < 3) ? 2.0 * v : v;
    }
  }
  return t;
}

double mandel_invariant_check(const Tensor2& f_total, const Tensor2& c, const Tensor2& cg,
                              const GrowthParams& p) {
  if (!(det(f_total) > 0.0)) throw std::invalid_argument("mandel_invariant_check: det F <= 0");
  const Tensor2 c_from_f = transpose(f_total) * f_total;
  if (frobenius_norm(c_from_f - c) > 1e-10 * std::max(frobenius_norm(c), 1.0)) {
    throw std::invalid_argument("mandel_invariant_check: C != F^T F");
  }
  const Tensor2 s = pk2_stress(c, cg, p);
  const Tensor2 ug = sym_sqrt(cg);
  const Tensor2 ug_inv = invert(ug);

  const Tensor2 cs = c * s;
  const Tensor2 tau = f_total * (s * transpose(f_total));
  const Tensor2 mandel = ug_inv * (cs * ug);

  double max_rel = 0.0;
  Tensor2 a1 = cs, a2 = tau, a3 = mandel;
  for (int alpha = 1; alpha <= 3; ++alpha) {
    const double t1 = trace(a1);
    const double t2 = trace(a2);
    const double t3 = trace(a3);
    const double scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3), 1e-30});
    max_rel = std::max(max_rel, std::abs(t1 - t2) / scale);
    max_rel = std::max(max_rel, std::abs(t1 - t3) / scale);
    if (alpha < 3) {
      a1 = a1 * cs;
      a2 = a2 * tau;
      a3 = a3 * mandel;
    }
  }
  return max_rel;
}

double dissipation_increment(const Tensor2& sigma_drv, const Tensor2& cg_old,
                             const Tensor2& cg_new) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += sigma_drv(i, j) * 0.5 * (cg_new(i, j) - cg_old(i, j));
  return s;
}

MaterialResponse update_material_point(const SymVoigt6& c, const GrowthState& state_n,
                                       const GrowthParams& p, double dt) {
  const Tensor2 ct = voigt_unpack(c);
  require_spd(ct, "update_material_point");
  MaterialResponse out;

  if (dt == 0.0) {
    // pure elastic response at frozen internal state
    const Tensor2 ug_inv = voigt_unpack(state_n.ug_inv);
    const Eval ev = evaluate(ct, det(ct), invert(ct), ug_inv, p);
    out.stress = pack_unchecked(sym(ev.s));
    const auto ds_dc = stress_sensitivity_c(ct, ev.cg_inv, ev.jg2, p);
    for (int i = 0; i < 6; ++i)
      for (int k = 0; k < 6; ++k) out.tangent(i, k) = (k < 3 ? 2.0 : 1.0) * ds_dc[k][i];
    out.state_new = state_n;
    out.potential_value = ev.phi;
    out.dissipation_increment = 0.0;
    return out;
  }

  auto [state_new, report] = local_solve(ct, state_n, p, dt);
  const Tensor2 ug_inv = voigt_unpack(state_new.ug_inv);
  const Eval ev = evaluate(ct, det(ct), invert(ct), ug_inv, p);
  out.stress = pack_unchecked(sym(ev.s));
  out.tangent = consistent_tangent(ct, state_n, state_new, p, dt);
  out.state_new = state_new;
  out.potential_value = ev.phi;
  const Tensor2 ug_inv_n = voigt_unpack(state_n.ug_inv);
  const Tensor2 cg_old = invert(ug_inv_n * ug_inv_n);
  out.dissipation_increment = dissipation_increment(ev.sigma, cg_old, ev.cg);
  return out;
}

}  // namespace growsim
