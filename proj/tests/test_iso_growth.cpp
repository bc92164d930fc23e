#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "growsim/iso_growth.hpp"
#include "oracles.hpp"

using namespace growsim;

namespace {

// stripe comparison parameters: row-3 elastic constants plus the isotropic law set
const IsoParams kIso{100.0, 800.0, 80.0, 0.1, 0.1, 2.0, 0.25, 2.0, 3.0};

double explicit_theta(const Tensor2& (*)(double), const IsoParams&, double, double);

// forward-Euler reference for theta_dot = k(theta) phi(M(theta))
template <class CHistory>
double explicit_theta_integration(const CHistory& c_of_t, const IsoParams& p, double t_end,
                                  double dt_sub) {
  double theta = 1.0;
  const int n = static_cast<int>(std::llround(t_end / dt_sub));
  for (int k = 0; k < n; ++k) {
    const Tensor2 c = c_of_t(k * dt_sub);
    const double phi = iso_phi(c, theta, p);
    theta += dt_sub * growth_velocity(theta, phi, p) * phi;
  }
  return theta;
}

}  // namespace

TEST_CASE("IsoParams validation") {
  IsoParams p = kIso;
  CHECK_NOTHROW(p.validate());
  p.theta_minus = 1.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = kIso;
  p.gamma_plus = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("iso_phi: stress-free values") {
  CHECK(iso_phi(Tensor2::identity(), 1.0, kIso) == doctest::Approx(-80.0).epsilon(1e-14));
  // C = theta^2 I forces Ce = I and M = 0
  const double th = 1.3;
  CHECK(iso_phi(Tensor2::diag(th * th, th * th, th * th), th, kIso) ==
        doctest::Approx(-80.0).epsilon(1e-13));
}

TEST_CASE("iso_phi: trace of Mandel stress against FD-validated stress") {
  oracles::Rng rng(301);
  for (int k = 0; k < 100; ++k) {
    const Tensor2 c = rng.spd(0.5, 2.5);
    const double theta = rng.uniform(0.6, 1.6);
    // tr M = tr(Ce * 2 dpsi_e/dCe) with the stress evaluated from Ce directly
    const double th2 = theta * theta;
    const Tensor2 ce = (1.0 / th2) * c;
    const double je2 = det(ce);
    const Tensor2 ce_inv = invert(ce);
    Tensor2 two_dpsi = (0.5 * kIso.lambda * (je2 - 1.0) - kIso.mu) * ce_inv;
    two_dpsi(0, 0) += kIso.mu;
    two_dpsi(1, 1) += kIso.mu;
    two_dpsi(2, 2) += kIso.mu;
    const double tr_m = trace(ce * two_dpsi);
    CHECK(iso_phi(c, theta, kIso) == doctest::Approx(tr_m - kIso.m_crit).epsilon(1e-8));
  }
}

TEST_CASE("growth_velocity: prefactors and boundary extinction") {
  CHECK(growth_velocity(1.0, 1.0, kIso) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(growth_velocity(kIso.theta_plus, 1.0, kIso) == doctest::Approx(0.0));
  CHECK(growth_velocity(1.5, 1.0, kIso) == doctest::Approx(0.025).epsilon(1e-14));
  CHECK(growth_velocity(1.0, -1.0, kIso) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(growth_velocity(kIso.theta_minus, -1.0, kIso) == doctest::Approx(0.0));
  CHECK(growth_velocity(1.2, 0.0, kIso) == 0.0);
}

TEST_CASE("iso_update: fixed point when phi vanishes") {
  // pick C so that phi(theta_n = 1) = 0: tr M = M_crit at theta = 1
  // solve scalar stretch by bisection
  const auto phi_at = [&](double stretch) {
    return iso_phi(Tensor2::diag(stretch * stretch, 1.0, 1.0), 1.0, kIso);
  };
  double lo = 1.0, hi = 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (phi_at(mid) < 0.0 ? lo : hi) = mid;
  }
  const double stretch = 0.5 * (lo + hi);
  const Tensor2 c = Tensor2::diag(stretch * stretch, 1.0, 1.0);
  const auto resp = iso_update(voigt_pack(c), IsoState{1.0}, kIso, 1.0);
  CHECK(resp.state_new.theta == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("iso_update: free state contracts but respects the lower bound") {
  IsoState s{1.0};
  const SymVoigt6 ci = voigt_pack(Tensor2::identity());
  for (int k = 0; k < 50; ++k) {
    const auto resp = iso_update(ci, s, kIso, 1.0);
    CHECK(resp.state_new.theta < s.theta + 1e-15);
    CHECK(resp.state_new.theta > kIso.theta_minus);
    s = resp.state_new;
  }
  CHECK(s.theta < 1.0);
  // explicit reference agrees on the direction
  const double th_ref = explicit_theta_integration(
      [](double) { return Tensor2::identity(); }, kIso, 5.0, 1e-4);
  CHECK(th_ref < 1.0);
  CHECK(th_ref > kIso.theta_minus);
}

TEST_CASE("iso_update: biaxial history matches explicit integration") {
  const auto c_of_t = [](double t) {
    const double s1 = 1.0 + 0.008 * t;
    const double s2 = 1.0 + 0.005 * t;
    return Tensor2::diag(s1 * s1, s2 * s2, 1.0);
  };
  const double theta_ref = explicit_theta_integration(c_of_t, kIso, 10.0, 1e-4);

  IsoState s{1.0};
  const double dt = 0.005;
  const int n = static_cast<int>(10.0 / dt);
  for (int k = 0; k < n; ++k) {
    s = iso_update(voigt_pack(c_of_t((k + 1) * dt)), s, kIso, dt).state_new;
  }
  CHECK(std::abs(s.theta - theta_ref) / theta_ref < 1e-4);
}

TEST_CASE("iso_update: backward Euler converges first order in dt") {
  const auto c_of_t = [](double t) {
    const double s1 = 1.0 + 0.01 * t;
    return Tensor2::diag(s1 * s1, 1.0, 1.0);
  };
  const double theta_ref = explicit_theta_integration(c_of_t, kIso, 8.0, 1e-4);
  double errs[3];
  const double dts[3] = {1.0, 0.5, 0.25};
  for (int j = 0; j < 3; ++j) {
    IsoState s{1.0};
    const int n = static_cast<int>(std::llround(8.0 / dts[j]));
    for (int k = 0; k < n; ++k)
      s = iso_update(voigt_pack(c_of_t((k + 1) * dts[j])), s, kIso, dts[j]).state_new;
    errs[j] = std::abs(s.theta - theta_ref);
  }
  CHECK(errs[1] < errs[0]);
  CHECK(errs[2] < errs[1]);
  // roughly first order: halving dt should at least halve the error up to slack
  CHECK(errs[2] < 0.35 * errs[0]);
}

TEST_CASE("iso_update: theta stays strictly inside the bounds under harsh input") {
  oracles::Rng rng(302);
  IsoState s{1.0};
  for (int k = 0; k < 200; ++k) {
    const Tensor2 c = rng.spd(0.3, 4.0);
    const auto resp = iso_update(voigt_pack(c), s, kIso, 1.0);
    CHECK(resp.state_new.theta > kIso.theta_minus);
    CHECK(resp.state_new.theta < kIso.theta_plus);
    s = resp.state_new;
  }
}

TEST_CASE("iso_update: tangent matches one-off full-update FD") {
  oracles::Rng rng(303);
  for (int k = 0; k < 20; ++k) {
    const Tensor2 c = rng.spd(0.7, 1.6);
    const IsoState s{rng.uniform(0.8, 1.2)};
    const auto resp = iso_update(voigt_pack(c), s, kIso, 1.0);

    static const int pi[6] = {0, 1, 2, 0, 0, 1};
    static const int pj[6] = {0, 1, 2, 1, 2, 2};
    for (int col = 0; col < 6; ++col) {
      const double h = 2e-6 * std::max(std::abs(c(pi[col], pj[col])), 1.0);
      Tensor2 cp = c, cm = c;
      cp(pi[col], pj[col]) += h;
      cp(pj[col], pi[col]) = cp(pi[col], pj[col]);
      cm(pi[col], pj[col]) -= h;
      cm(pj[col], pi[col]) = cm(pi[col], pj[col]);
      const auto rp = iso_update(voigt_pack(cp), s, kIso, 1.0);
      const auto rm = iso_update(voigt_pack(cm), s, kIso, 1.0);
      for (int i = 0; i < 6; ++i) {
        const double d = (rp.stress[i] - rm.stress[i]) / (2.0 * h);
        const double want = (col < 3) ? 2.0 * d : d;
        CHECK(resp.tangent(i, col) == doctest::Approx(want).epsilon(5e-4).scale(1.0));
      }
    }
  }
}
