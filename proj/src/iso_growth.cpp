#include "growsim/iso_growth.hpp"

#include <cmath>
#include <stdexcept>

namespace growsim {

void IsoParams::validate() const {
  const auto fail = [](const std::string& msg) { throw std::invalid_argument("IsoParams: " + msg); };
  if (!(mu > 0.0)) fail("mu must be > 0");
  if (!(lambda > 0.0)) fail("lambda must be > 0");
  if (!(k_plus >= 0.0) || !(k_minus >= 0.0)) fail("growth speeds must be >= 0");
  if (!(theta_minus < 1.0 && 1.0 < theta_plus)) fail("need theta_minus < 1 < theta_plus");
  if (!(gamma_plus > 0.0) || !(gamma_minus > 0.0)) fail("shape exponents must be > 0");
}

namespace {

// tr M = mu (tr Ce - 3) + 3 lambda/2 (Je^2 - 1), Ce = C / theta^2
double trace_mandel(const Tensor2& c, double theta, const IsoParams& p) {
  const double th2 = theta * theta;
  const double tr_ce = trace(c) / th2;
  const double je2 = det(c) / (th2 * th2 * th2);
  return p.mu * (tr_ce - 3.0) + 1.5 * p.lambda * (je2 - 1.0);
}

double solve_theta(const Tensor2& c, double theta_n, const IsoParams& p, double dt) {
  const auto g = [&](double th) {
    const double phi = trace_mandel(c, th, p) - p.m_crit;
    return th - theta_n - dt * growth_velocity(th, phi, p) * phi;
  };
  double th = theta_n;
  bool ok = false;
  for (int it = 0; it < 50; ++it) {
    const double gv = g(th);
    if (std::abs(gv) < 1e-12) {
      ok = true;
      break;
    }
    const double h = 1e-8 * std::max(std::abs(th), 1.0);
    const double dg = (g(th + h) - g(th - h)) / (2.0 * h);
    double step = (dg != 0.0) ? gv / dg : 0.0;
    double th_new = th - step;
    if (dg == 0.0 || !(th_new > p.theta_minus && th_new < p.theta_plus)) break;
    th = th_new;
  }
  if (!ok || !(th > p.theta_minus && th < p.theta_plus)) {
    // bisection on the stretch bracket; g < 0 at the lower bound, g > 0 above
    double lo = p.theta_minus, hi = p.theta_plus;
    if (g(lo) > 0.0) std::swap(lo, hi);
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      mid = 0.5 * (lo + hi);
      const double gm = g(mid);
      if (std::abs(gm) < 1e-12 || std::abs(hi - lo) < 1e-15) break;
      if (gm < 0.0)
        lo = mid;
      else
        hi = mid;
    }
    th = mid;
  }
  return th;
}

SymVoigt6 iso_stress(const Tensor2& c, double theta, const IsoParams& p) {
  // S = mu (theta^-2 I - C^-1) + lambda/2 (Je^2 - 1) C^-1
  const double th2 = theta * theta;
  const double je2 = det(c) / (th2 * th2 * th2);
  const Tensor2 ci = invert(c);
  Tensor2 s = (0.5 * p.lambda * (je2 - 1.0) - p.mu) * ci;
  const double a = p.mu / th2;
  s(0, 0) += a;
  s(1, 1) += a;
  s(2, 2) += a;
  return SymVoigt6{{s(0, 0), s(1, 1), s(2, 2), 0.5 * (s(0, 1) + s(1, 0)),
                    0.5 * (s(0, 2) + s(2, 0)), 0.5 * (s(1, 2) + s(2, 1))}};
}

}  // namespace

SymVoigt6 iso_pk2(const Tensor2& c, double theta, const IsoParams& p) {
  return iso_stress(c, theta, p);
}

double iso_phi(const Tensor2& c, double theta, const IsoParams& p) {
  if (!(theta >= p.theta_minus && theta <= p.theta_plus)) {
    throw std::invalid_argument("iso_phi: theta outside stretch bounds");
  }
  return trace_mandel(c, theta, p) - p.m_crit;
}

double growth_velocity(double theta, double phi, const IsoParams& p) {
  if (!(theta >= p.theta_minus && theta <= p.theta_plus)) {
    throw std::invalid_argument("growth_velocity: theta outside stretch bounds");
  }
  if (phi > 0.0) {
    return p.k_plus * std::pow((p.theta_plus - theta) / (p.theta_plus - 1.0), p.gamma_plus);
  }
  if (phi < 0.0) {
    return p.k_minus * std::pow((theta - p.theta_minus) / (1.0 - p.theta_minus), p.gamma_minus);
  }
  return 0.0;
}

IsoResponse iso_update(const SymVoigt6& c, const IsoState& state_n, const IsoParams& p, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("iso_update: dt must be > 0");
  const Tensor2 ct = voigt_unpack(c);
  if (!is_spd(ct)) throw std::invalid_argument("iso_update: C not SPD");

  IsoResponse out;
  const double theta = solve_theta(ct, state_n.theta, p, dt);
  out.state_new.theta = theta;
  out.stress = iso_stress(ct, theta, p);
  out.phi_value = trace_mandel(ct, theta, p) - p.m_crit;

  // tangent by central FD over the full update (re-solve theta per perturbation)
  static const int pi[6] = {0, 1, 2, 0, 0, 1};
  static const int pj[6] = {0, 1, 2, 1, 2, 2};
  for (int k = 0; k < 6; ++k) {
    const double h = 1e-6 * std::max(std::abs(ct(pi[k], pj[k])), 1.0);
    Tensor2 cp = ct, cm = ct;
    cp(pi[k], pj[k]) += h;
    cp(pj[k], pi[k]) = cp(pi[k], pj[k]);
    cm(pi[k], pj[k]) -= h;
    cm(pj[k], pi[k]) = cm(pi[k], pj[k]);
    const SymVoigt6 sp = iso_stress(cp, solve_theta(cp, state_n.theta, p, dt), p);
    const SymVoigt6 sm = iso_stress(cm, solve_theta(cm, state_n.theta, p, dt), p);
    for (int i = 0; i < 6; ++i) {
      const double d = (sp[i] - sm[i]) / (2.0 * h);
      out.tangent(i, k) = (k < 3) ? 2.0 * d : d;
    }
  }
  return out;
}

}  // namespace growsim
