#pragma once

// Test-only reference implementations, kept independent of the library paths
// they are used to check.

#include <cmath>
#include <random>

#include "growsim/growth_law.hpp"
#include "growsim/tensor.hpp"

namespace oracles {

using growsim::Tensor2;

// Plain long-double series without scaling-and-squaring; reliable for |a| <~ 3.
inline Tensor2 mat_exp_series_ld(const Tensor2& x, int terms = 60) {
  long double sum[9], term[9];
  for (int k = 0; k < 9; ++k) {
    sum[k] = (k % 4 == 0) ? 1.0L : 0.0L;
    term[k] = sum[k];
  }
  for (int n = 1; n <= terms; ++n) {
    long double next[9] = {};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        long double s = 0.0L;
        for (int l = 0; l < 3; ++l)
          s += term[3 * i + l] * static_cast<long double>(x(l, j));
        next[3 * i + j] = s / n;
      }
    for (int k = 0; k < 9; ++k) {
      term[k] = next[k];
      sum[k] += term[k];
    }
  }
  Tensor2 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = static_cast<double>(sum[3 * i + j]);
  return r;
}

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
    // uniform via normalized quaternion
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

  Tensor2 spd(double ev_lo, double ev_hi) {
    const Tensor2 q = rotation();
    const Tensor2 d = Tensor2::diag(uniform(ev_lo, ev_hi), uniform(ev_lo, ev_hi),
                                    uniform(ev_lo, ev_hi));
    return growsim::sym(growsim::transpose(q) * (d * q));
  }

  Tensor2 symmetric(double lo = -1.0, double hi = 1.0) { return growsim::sym(matrix(lo, hi)); }

 private:
  std::mt19937_64 gen_;
};

// Forward-Euler integration of dCg/dt = lam_dot * f with the rate law
// lam_dot = sign(Phi) |Phi/(m sg^2)|^(1/nu) / eta for a prescribed C history.
// Returns Cg at t_end.
template <class CHistory>
Tensor2 explicit_growth_integration(const CHistory& c_of_t, const growsim::GrowthParams& p,
                                    double t_end, double dt_sub) {
  Tensor2 cg = Tensor2::identity();
  const double omega = p.m * p.sigma_g * p.sigma_g;
  const int n = static_cast<int>(std::llround(t_end / dt_sub));
  for (int k = 0; k < n; ++k) {
    const double t = k * dt_sub;
    const Tensor2 c = c_of_t(t);
    const growsim::DrivingForces d = growsim::driving_forces(c, cg, p);
    const auto [i1, j2] = growsim::invariants(d.sigma_drv, cg);
    const double phi = growsim::potential(i1, j2, p);
    const double lam_dot =
        ((phi > 0.0) - (phi < 0.0)) * std::pow(std::abs(phi) / omega, 1.0 / p.nu) / p.eta;
    const auto ft = growsim::flow_tensors(d.sigma_drv, cg, p);
    cg = growsim::sym(cg + (lam_dot * dt_sub) * ft.f);
  }
  return cg;
}

}  // namespace oracles
