#include "growsim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <random>

#include "growsim/growth_law.hpp"
#include "growsim/hex8.hpp"
#include "growsim/iso_growth.hpp"
#include "growsim/mesh.hpp"
#include "growsim/tensor.hpp"

namespace growsim {

namespace {

const GrowthParams kRefGrowth{40.0, 400.0, 250.0, 1.2, 200.0, 100.0, 1.0};
const IsoParams kRefIso{100.0, 800.0, 80.0, 0.1, 0.1, 2.0, 0.25, 2.0, 3.0};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  Tensor2 matrix(double lo = -1.0, double hi = 1.0) {
    Tensor2 t;
    for (auto& c : t.a) c = uniform(lo, hi);
    return t;
  }
  Tensor2 rotation() {
    double q[4];
    double n2 = 0.0;
    for (double& c : q) {
      c = std::normal_distribution<double>(0.0, 1.0)(gen_);
      n2 += c * c;
    }
    const double n = std::sqrt(n2);
    const double w = q[0] / n, x = q[1] / n, y = q[2] / n, z = q[3] / n;
    Tensor2 r;
    r(0, 0) = 1 - 2 * (y * y + z * z);
    r(0, 1) = 2 * (x * y - w * z);
    r(0, 2) = 2 * (x * z + w * y);
    r(1, 0) = 2 * (x * y + w * z);
    r(1, 1) = 1 - 2 * (x * x + z * z);
    r(1, 2) = 2 * (y * z - w * x);
    r(2, 0) = 2 * (x * z - w * y);
    r(2, 1) = 2 * (y * z + w * x);
    r(2, 2) = 1 - 2 * (x * x + y * y);
    return r;
  }
  Tensor2 spd(double lo, double hi) {
    const Tensor2 q = rotation();
    return sym(transpose(q) * (Tensor2::diag(uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)) * q));
  }

 private:
  std::mt19937_64 gen_;
};

double rel(const Tensor2& got, const Tensor2& want) {
  return frobenius_norm(got - want) / std::max(frobenius_norm(want), 1e-300);
}

Tangent66 full_update_fd(const Tensor2& c, const GrowthState& state_n, const GrowthParams& p,
                         double dt) {
  static const int pi[6] = {0, 1, 2, 0, 0, 1};
  static const int pj[6] = {0, 1, 2, 1, 2, 2};
  Tangent66 t;
  for (int k = 0; k < 6; ++k) {
    const double h = 1e-6 * std::max(std::abs(c(pi[k], pj[k])), 1.0);
    Tensor2 cp = c, cm = c;
    cp(pi[k], pj[k]) += h;
    cp(pj[k], pi[k]) = cp(pi[k], pj[k]);
    cm(pi[k], pj[k]) -= h;
    cm(pj[k], pi[k]) = cm(pi[k], pj[k]);
    const auto rp = update_material_point(voigt_pack(cp), state_n, p, dt);
    const auto rm = update_material_point(voigt_pack(cm), state_n, p, dt);
    for (int i = 0; i < 6; ++i) {
      const double d = (rp.stress[i] - rm.stress[i]) / (2.0 * h);
      t(i, k) = (k < 3) ? 2.0 * d : d;
    }
  }
  return t;
}

double tangent_rel(const Tangent66& a, const Tangent66& b) {
  double num = 0.0, den = 0.0;
  for (int i = 0; i < 36; ++i) {
    num += (a.m[i] - b.m[i]) * (a.m[i] - b.m[i]);
    den += b.m[i] * b.m[i];
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

template <class Fn>
PropertyCheck run_prop(const std::string& name, double tol, int draws, std::uint64_t seed,
                       const Fn& fn) {
  PropertyCheck c;
  c.name = name;
  c.tolerance = tol;
  c.draws = draws;
  Rng rng(seed);
  double max_err = 0.0;
  for (int k = 0; k < draws; ++k) max_err = std::max(max_err, fn(rng));
  c.max_error = max_err;
  c.pass = max_err <= tol;
  return c;
}

}  // namespace

VerifyReport run_verification(const VerifyOptions& opts) {
  VerifyReport rep;
  rep.level = opts.draws >= 1000 ? "full" : "quick";
  rep.draws = opts.draws;
  const int n = opts.draws;
  auto& props = rep.properties;

  props.push_back(run_prop("tensor.sym_sqrt_reconstruction", 1e-10, std::max(n, 1000), 11,
                           [](Rng& rng) {
                             const Tensor2 a = rng.spd(0.1, 10.0);
                             const Tensor2 s = sym_sqrt(a);
                             return rel(s * s, a);
                           }));

  props.push_back(run_prop("tensor.mat_exp_inverse", 1e-10, n, 12, [](Rng& rng) {
    Tensor2 a = rng.matrix(-2.0, 2.0);
    const double nn = frobenius_norm(a);
    if (nn > 5.0) a = (5.0 / nn) * a;
    return frobenius_norm(mat_exp(a) * mat_exp(-1.0 * a) - Tensor2::identity());
  }));

  props.push_back(run_prop("tensor.mat_exp_det_trace", 1e-10, n, 13, [](Rng& rng) {
    Tensor2 a = rng.matrix(-1.5, 1.5);
    return std::abs(det(mat_exp(a)) - std::exp(trace(a))) / std::exp(trace(a));
  }));

  props.push_back(run_prop("tensor.voigt_roundtrip", 0.0, n, 14, [](Rng& rng) {
    const Tensor2 s = sym(rng.matrix(-3.0, 3.0));
    const Tensor2 r = voigt_unpack(voigt_pack(s));
    double err = 0.0;
    for (int i = 0; i < 9; ++i) err = std::max(err, std::abs(r.a[i] - s.a[i]));
    return err;
  }));

  props.push_back(run_prop("tensor.deviator_trace", 1e-12, n, 15, [](Rng& rng) {
    const Tensor2 a = rng.matrix(-5.0, 5.0);
    return std::abs(trace(deviator(a))) / std::max(frobenius_norm(a), 1e-300);
  }));

  props.push_back(run_prop("tensor.invert_residual", 1e-12, n, 16, [](Rng& rng) {
    const Tensor2 q = rng.rotation();
    const Tensor2 a =
        transpose(q) * (Tensor2::diag(rng.uniform(0.5, 3.0), rng.uniform(0.5, 3.0),
                                      rng.uniform(0.5, 3.0)) *
                        q) +
        0.1 * rng.matrix();
    return frobenius_norm(a * invert(a) - Tensor2::identity());
  }));

  props.push_back(run_prop("growth.invariant_transformation", 1e-10, std::max(n, 1000), 17,
                           [](Rng& rng) {
                             const Tensor2 c = rng.spd(0.4, 3.0);
                             const Tensor2 cg = rng.spd(0.4, 3.0);
                             const auto d = driving_forces(c, cg, kRefGrowth);
                             const auto [i1, j2] = invariants(d.sigma_drv, cg);
                             const Tensor2 ug = sym_sqrt(cg);
                             const Tensor2 mx = ug * (d.sigma_drv * ug);
                             const Tensor2 dv = deviator(mx);
                             const double i1i = trace(mx);
                             const double j2i = 0.5 * trace(dv * dv);
                             const double e1 =
                                 std::abs(i1 - i1i) / std::max({std::abs(i1), std::abs(i1i), 1.0});
                             const double e2 =
                                 std::abs(j2 - j2i) / std::max({std::abs(j2), std::abs(j2i), 1.0});
                             return std::max(e1, e2);
                           }));

  props.push_back(run_prop("growth.mandel_kirchhoff_invariants", 1e-10, std::max(n, 1000), 18,
                           [](Rng& rng) {
                             Tensor2 f = Tensor2::identity() + 0.3 * rng.matrix();
                             if (det(f) < 0.2) f = Tensor2::identity();
                             const Tensor2 c = transpose(f) * f;
                             const Tensor2 cg = rng.spd(0.5, 2.0);
                             return mandel_invariant_check(f, c, cg, kRefGrowth);
                           }));

  props.push_back(run_prop("growth.stress_energy_fd", 1e-6, n, 19, [](Rng& rng) {
    const Tensor2 c = rng.spd(0.5, 2.5);
    const Tensor2 cg = rng.spd(0.5, 2.5);
    static const int pi[6] = {0, 1, 2, 0, 0, 1};
    static const int pj[6] = {0, 1, 2, 1, 2, 2};
    const Tensor2 s = pk2_stress(c, cg, kRefGrowth);
    const Tensor2 x = back_stress(cg, kRefGrowth);
    double err = 0.0;
    for (int k = 0; k < 6; ++k) {
      const double h = 1e-6 * std::max(std::abs(c(pi[k], pj[k])), 1.0);
      Tensor2 cp = c, cm = c;
      cp(pi[k], pj[k]) += h;
      cp(pj[k], pi[k]) = cp(pi[k], pj[k]);
      cm(pi[k], pj[k]) -= h;
      cm(pj[k], pi[k]) = cm(pi[k], pj[k]);
      const double d = (elastic_energy(cp, cg, kRefGrowth) - elastic_energy(cm, cg, kRefGrowth)) /
                       (2.0 * h);
      const double want = (k < 3) ? 2.0 * d : d;
      err = std::max(err, std::abs(s(pi[k], pj[k]) - want) /
                              std::max(frobenius_norm(s), 1.0));
      Tensor2 gp = cg, gm = cg;
      gp(pi[k], pj[k]) += h;
      gp(pj[k], pi[k]) = gp(pi[k], pj[k]);
      gm(pi[k], pj[k]) -= h;
      gm(pj[k], pi[k]) = gm(pi[k], pj[k]);
      const double dg =
          (growth_energy(sym(gp), kRefGrowth) - growth_energy(sym(gm), kRefGrowth)) / (2.0 * h);
      const double want_g = (k < 3) ? 2.0 * dg : dg;
      err = std::max(err, std::abs(x(pi[k], pj[k]) - want_g) /
                              std::max(frobenius_norm(x), 1.0));
    }
    return err;
  }));

  props.push_back(run_prop("growth.uniaxial_homeostatic_roots", 1e-10, n, 20, [](Rng& rng) {
    GrowthParams p = kRefGrowth;
    p.m = rng.uniform(0.2, 2.5);
    if (std::abs(p.m - 1.0) < 0.05) p.m = 1.4;
    p.sigma_g = rng.uniform(20.0, 400.0);
    const double omega = p.m * p.sigma_g * p.sigma_g;
    const auto [i1a, j2a] = invariants(Tensor2::diag(p.sigma_g, 0, 0), Tensor2::identity());
    const auto [i1b, j2b] = invariants(Tensor2::diag(-p.m * p.sigma_g, 0, 0), Tensor2::identity());
    return std::max(std::abs(potential(i1a, j2a, p)), std::abs(potential(i1b, j2b, p))) / omega;
  }));

  props.push_back(run_prop("growth.local_fixed_point", 1e-10, 1, 21, [](Rng&) {
    // uniaxial state on the homeostatic surface
    const auto phi_of = [&](double stretch) {
      const Tensor2 c = Tensor2::diag(stretch * stretch, 1.0, 1.0);
      const auto d = driving_forces(c, Tensor2::identity(), kRefGrowth);
      const auto [i1, j2] = invariants(d.sigma_drv, Tensor2::identity());
      return potential(i1, j2, kRefGrowth);
    };
    double lo = 1.0, hi = 6.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (phi_of(mid) < 0.0 ? lo : hi) = mid;
    }
    const Tensor2 c = Tensor2::diag(lo * lo, 1.0, 1.0);
    const auto [state, r] = local_solve(c, GrowthState::virgin(), kRefGrowth, 1.0);
    double err = std::abs(state.lambda_acc);
    err = std::max(err, rel(voigt_unpack(state.ug_inv), Tensor2::identity()));
    return err;
  }));

  props.push_back(run_prop("growth.sign_coupling", 0.0, n, 22, [](Rng& rng) {
    const double stretch = rng.uniform(0.85, 1.6);
    const Tensor2 c = Tensor2::diag(stretch * stretch, 1.0, 1.0);
    const auto [state, r] = local_solve(c, GrowthState::virgin(), kRefGrowth, 1.0);
    const Tensor2 ui = voigt_unpack(state.ug_inv);
    const Tensor2 cg = invert(ui * ui);
    const auto d = driving_forces(c, cg, kRefGrowth);
    const auto [i1, j2] = invariants(d.sigma_drv, cg);
    const double phi = potential(i1, j2, kRefGrowth);
    if (std::abs(r.delta_lambda) < 1e-12) return 0.0;
    return phi * r.delta_lambda > 0.0 ? 0.0 : 1.0;
  }));

  props.push_back(run_prop("growth.isotropy_recovery", 1e-10, n, 23, [](Rng& rng) {
    const double cval = rng.uniform(0.7, 1.8);
    const auto [state, r] =
        local_solve(Tensor2::diag(cval, cval, cval), GrowthState::virgin(), kRefGrowth, 1.0);
    const Tensor2 ui = voigt_unpack(state.ug_inv);
    const Tensor2 cg = invert(ui * ui);
    double err = std::abs(cg(0, 1)) + std::abs(cg(0, 2)) + std::abs(cg(1, 2));
    err = std::max(err, std::abs(cg(0, 0) - cg(1, 1)));
    err = std::max(err, std::abs(cg(1, 1) - cg(2, 2)));
    return err;
  }));

  const double tangent_perturbation = opts.tangent_perturbation;
  props.push_back(run_prop("growth.consistent_tangent_fd", 1e-5, n, 24,
                           [tangent_perturbation](Rng& rng) {
                             const Tensor2 c0 = rng.spd(0.6, 1.9);
                             const auto [state_n, r0] =
                                 local_solve(c0, GrowthState::virgin(), kRefGrowth, 1.0);
                             Tensor2 c = sym(c0 + 0.05 * sym(rng.matrix()));
                             if (!is_spd(c)) c = c0;
                             auto [s1, r1] = local_solve(c, state_n, kRefGrowth, 1.0);
                             Tangent66 t = consistent_tangent(c, state_n, s1, kRefGrowth, 1.0);
                             t(0, 0) *= (1.0 + tangent_perturbation);
                             return tangent_rel(t, full_update_fd(c, state_n, kRefGrowth, 1.0));
                           }));

  props.push_back(run_prop("growth.objectivity_scalars", 1e-10, n, 25, [](Rng& rng) {
    const Tensor2 c = rng.spd(0.6, 1.9);
    const Tensor2 cg = rng.spd(0.6, 1.9);
    const Tensor2 q = rng.rotation();
    const Tensor2 cq = sym(transpose(q) * (c * q));
    const Tensor2 cgq = sym(transpose(q) * (cg * q));
    double err = std::abs(elastic_energy(c, cg, kRefGrowth) - elastic_energy(cq, cgq, kRefGrowth)) /
                 std::max(std::abs(elastic_energy(c, cg, kRefGrowth)), 1.0);
    const auto d = driving_forces(c, cg, kRefGrowth);
    const auto dq = driving_forces(cq, cgq, kRefGrowth);
    const auto [i1, j2] = invariants(d.sigma_drv, cg);
    const auto [i1q, j2q] = invariants(dq.sigma_drv, cgq);
    err = std::max(err, std::abs(i1 - i1q) / std::max(std::abs(i1), 1.0));
    err = std::max(err, std::abs(j2 - j2q) / std::max(std::abs(j2), 1.0));
    err = std::max(err, std::abs(potential(i1, j2, kRefGrowth) - potential(i1q, j2q, kRefGrowth)) /
                            (kRefGrowth.m * kRefGrowth.sigma_g * kRefGrowth.sigma_g));
    return err;
  }));

  props.push_back(run_prop("growth.flow_two_route", 1e-12, n, 26, [](Rng& rng) {
    const Tensor2 c = rng.spd(0.4, 3.0);
    const Tensor2 cg = rng.spd(0.4, 3.0);
    const auto d = driving_forces(c, cg, kRefGrowth);
    const auto ft = flow_tensors(d.sigma_drv, cg, kRefGrowth);
    const Tensor2 ug = sym_sqrt(cg);
    const Tensor2 sc = d.sigma_drv * cg;
    Tensor2 a = 3.0 * deviator(sc);
    const double sph = (1.0 - kRefGrowth.m) * kRefGrowth.sigma_g;
    a(0, 0) -= sph;
    a(1, 1) -= sph;
    a(2, 2) -= sph;
    const Tensor2 nn = ug * (a * invert(ug));
    const Tensor2 f_ref = (2.0 / frobenius_norm(nn)) * (ug * (nn * ug));
    return rel(ft.f, f_ref);
  }));

  props.push_back(run_prop("iso.theta_bounds", 0.0, n, 27, [](Rng& rng) {
    IsoState s{1.0};
    for (int k = 0; k < 20; ++k) {
      const Tensor2 c = rng.spd(0.3, 4.0);
      s = iso_update(voigt_pack(c), s, kRefIso, 1.0).state_new;
      if (!(s.theta > kRefIso.theta_minus && s.theta < kRefIso.theta_plus)) return 1.0;
    }
    return 0.0;
  }));

  props.push_back(run_prop("iso.explicit_convergence", 0.6, 1, 28, [](Rng&) {
    const auto c_of_t = [](double t) {
      const double s1 = 1.0 + 0.01 * t;
      return Tensor2::diag(s1 * s1, 1.0, 1.0);
    };
    double theta_ref = 1.0;
    for (int k = 0; k < 80000; ++k) {
      const double phi = iso_phi(c_of_t(k * 1e-4), theta_ref, kRefIso);
      theta_ref += 1e-4 * growth_velocity(theta_ref, phi, kRefIso) * phi;
    }
    const auto be = [&](double dt) {
      IsoState s{1.0};
      const int nsteps = static_cast<int>(std::llround(8.0 / dt));
      for (int k = 0; k < nsteps; ++k)
        s = iso_update(voigt_pack(c_of_t((k + 1) * dt)), s, kRefIso, dt).state_new;
      return std::abs(s.theta - theta_ref);
    };
    return be(0.25) / std::max(be(1.0), 1e-300);
  }));

  props.push_back(run_prop("fem.element_stiffness_fd", 1e-6, std::max(2, n / 50), 29, [](Rng& rng) {
    const Mesh m = build_block_mesh(1, 1, 1, 1, 1, 1);
    std::array<std::array<double, 3>, 8> coords;
    for (int a = 0; a < 8; ++a)
      coords[static_cast<std::size_t>(a)] =
          m.nodes[static_cast<std::size_t>(m.elements[0][static_cast<std::size_t>(a)])];
    const auto geo = element_reference_geometry(coords);
    const Material mat{kRefGrowth};
    std::array<PointState, 8> states;
    for (auto& s : states) s = initial_point_state(mat);
    std::array<std::array<double, 3>, 8> u;
    for (auto& ua : u)
      ua = {0.02 * rng.uniform(-1, 1), 0.02 * rng.uniform(-1, 1), 0.02 * rng.uniform(-1, 1)};
    const auto r = element_force_stiffness(geo, u, states, mat, 1.0);
    double knorm = 0.0;
    for (double v : r.k) knorm = std::max(knorm, std::abs(v));
    double err = 0.0;
    const double h = 1e-6;
    for (int col = 0; col < 24; ++col) {
      auto up = u, um = u;
      up[static_cast<std::size_t>(col / 3)][static_cast<std::size_t>(col % 3)] += h;
      um[static_cast<std::size_t>(col / 3)][static_cast<std::size_t>(col % 3)] -= h;
      const auto rp = element_force_stiffness(geo, up, states, mat, 1.0);
      const auto rm = element_force_stiffness(geo, um, states, mat, 1.0);
      for (int row = 0; row < 24; ++row) {
        const double fd =
            (rp.f_int[static_cast<std::size_t>(row)] - rm.f_int[static_cast<std::size_t>(row)]) /
            (2.0 * h);
        err = std::max(err, std::abs(r.k[static_cast<std::size_t>(24 * row + col)] - fd) / knorm);
      }
    }
    return err;
  }));

  props.push_back(run_prop("fem.patch_consistency", 1e-12, std::max(2, n / 20), 30, [](Rng& rng) {
    const Mesh m = build_block_mesh(1, 1, 1, 1, 1, 1);
    std::array<std::array<double, 3>, 8> coords;
    for (int a = 0; a < 8; ++a)
      coords[static_cast<std::size_t>(a)] =
          m.nodes[static_cast<std::size_t>(m.elements[0][static_cast<std::size_t>(a)])];
    const auto geo = element_reference_geometry(coords);
    const Material mat{kRefGrowth};
    std::array<PointState, 8> states;
    for (auto& s : states) s = initial_point_state(mat);
    // homogeneous displacement field u = (F - I) X
    Tensor2 grad = 0.05 * rng.matrix();
    std::array<std::array<double, 3>, 8> u;
    for (int a = 0; a < 8; ++a)
      for (int i = 0; i < 3; ++i) {
        double v = 0.0;
        for (int j = 0; j < 3; ++j)
          v += grad(i, j) * coords[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)];
        u[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] = v;
      }
    const auto r = element_force_stiffness(geo, u, states, mat, 1.0);
    const auto& s0 = std::get<GrowthState>(r.new_states[0]);
    double err = 0.0;
    for (int q = 1; q < 8; ++q) {
      const auto& sq = std::get<GrowthState>(r.new_states[static_cast<std::size_t>(q)]);
      for (int i = 0; i < 6; ++i) err = std::max(err, std::abs(sq.ug_inv[i] - s0.ug_inv[i]));
    }
    return err;
  }));

  rep.all_pass = true;
  for (const auto& p : props) rep.all_pass = rep.all_pass && p.pass;
  return rep;
}

std::string report_to_json(const VerifyReport& report) {
  nlohmann::json j;
  j["level"] = report.level;
  j["draws"] = report.draws;
  j["all_pass"] = report.all_pass;
  j["properties"] = nlohmann::json::array();
  for (const auto& p : report.properties) {
    j["properties"].push_back({{"name", p.name},
                               {"pass", p.pass},
                               {"max_error", p.max_error},
                               {"tolerance", p.tolerance},
                               {"draws", p.draws}});
  }
  return j.dump(2) + "\n";
}

}  // namespace growsim
