#include "growsim/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace growsim {

Tensor2 Tensor2::identity() { return diag(1.0, 1.0, 1.0); }

Tensor2 Tensor2::diag(double d0, double d1, double d2) {
  Tensor2 t;
  t(0, 0) = d0;
  t(1, 1) = d1;
  t(2, 2) = d2;
  return t;
}

Tensor2 operator+(const Tensor2& x, const Tensor2& y) {
  Tensor2 r;
  for (std::size_t k = 0; k < 9; ++k) r.a[k] = x.a[k] + y.a[k];
  return r;
}

Tensor2 operator-(const Tensor2& x, const Tensor2& y) {
  Tensor2 r;
  for (std::size_t k = 0; k < 9; ++k) r.a[k] = x.a[k] - y.a[k];
  return r;
}

Tensor2 operator*(double s, const Tensor2& x) {
  Tensor2 r;
  for (std::size_t k = 0; k < 9; ++k) r.a[k] = s * x.a[k];
  return r;
}

Tensor2 operator*(const Tensor2& x, const Tensor2& y) {
  Tensor2 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r(i, j) = x(i, 0) * y(0, j) + x(i, 1) * y(1, j) + x(i, 2) * y(2, j);
  return r;
}

Tensor2 transpose(const Tensor2& x) {
  Tensor2 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = x(j, i);
  return r;
}

double trace(const Tensor2& x) { return x(0, 0) + x(1, 1) + x(2, 2); }

double det(const Tensor2& x) {
  return x(0, 0) * (x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1)) -
         x(0, 1) * (x(1, 0) * x(2, 2) - x(1, 2) * x(2, 0)) +
         x(0, 2) * (x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0));
}

Tensor2 sym(const Tensor2& x) {
  Tensor2 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = 0.5 * (x(i, j) + x(j, i));
  return r;
}

Tensor2 invert(const Tensor2& x) {
  const double d = det(x);
  const double nrm = frobenius_norm(x);
  if (std::abs(d) <= tol::det_eps * nrm * nrm * nrm) {
    std::ostringstream os;
    os << "invert: singular matrix, det = " << d << ", norm = " << nrm;
    throw std::invalid_argument(os.str());
  }
  Tensor2 r;
  r(0, 0) = (x(1, 1) * x(2, 2) - x(1, 2) * x(2, 1)) / d;
  r(0, 1) = (x(0, 2) * x(2, 1) - x(0, 1) * x(2, 2)) / d;
  r(0, 2) = (x(0, 1) * x(1, 2) - x(0, 2) * x(1, 1)) / d;
  r(1, 0) = (x(1, 2) * x(2, 0) - x(1, 0) * x(2, 2)) / d;
  r(1, 1) = (x(0, 0) * x(2, 2) - x(0, 2) * x(2, 0)) / d;
  r(1, 2) = (x(0, 2) * x(1, 0) - x(0, 0) * x(1, 2)) / d;
  r(2, 0) = (x(1, 0) * x(2, 1) - x(1, 1) * x(2, 0)) / d;
  r(2, 1) = (x(0, 1) * x(2, 0) - x(0, 0) * x(2, 1)) / d;
  r(2, 2) = (x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0)) / d;
  return r;
}

Tensor2 deviator(const Tensor2& x) {
  const double p = trace(x) / 3.0;
  Tensor2 r = x;
  r(0, 0) -= p;
  r(1, 1) -= p;
  r(2, 2) -= p;
  return r;
}

double frobenius_norm(const Tensor2& x) {
  double s = 0.0;
  for (double c : x.a) s += c * c;
  return std::sqrt(s);
}

namespace {

void check_symmetric(const Tensor2& x, const char* who) {
  const double nrm = frobenius_norm(x);
  double skew = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) skew = std::max(skew, std::abs(x(i, j) - x(j, i)));
  if (skew > tol::sym_rel * std::max(nrm, 1e-300)) {
    std::ostringstream os;
    os << who << ": input not symmetric, max skew = " << skew << ", norm = " << nrm;
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

EigenSystem sym_eig(const Tensor2& x) {
  check_symmetric(x, "sym_eig");
  // cyclic Jacobi; unconditionally stable at 3x3
  Tensor2 a = sym(x);
  Tensor2 v = Tensor2::identity();
  const double nrm = std::max(frobenius_norm(a), 1e-300);
  for (int sweep = 0; sweep < 50; ++sweep) {
    double off = std::sqrt(a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2));
    if (off <= tol::eig_rel * nrm) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        Tensor2 g = Tensor2::identity();
        g(p, p) = c;
        g(q, q) = c;
        g(p, q) = s;
        g(q, p) = -s;
        a = transpose(g) * a * g;
        a = sym(a);
        v = v * g;
      }
    }
  }
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) > a(j, j); });
  EigenSystem es;
  for (int k = 0; k < 3; ++k) {
    es.values[static_cast<std::size_t>(k)] = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    for (int i = 0; i < 3; ++i)
      es.vectors[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] =
          v(i, order[static_cast<std::size_t>(k)]);
  }
  return es;
}

Tensor2 sym_sqrt(const Tensor2& x) {
  check_symmetric(x, "sym_sqrt");
  const EigenSystem es = sym_eig(x);
  if (es.values[2] <= 0.0) {
    std::ostringstream os;
    os << "sym_sqrt: input not positive definite, smallest eigenvalue = " << es.values[2];
    throw std::invalid_argument(os.str());
  }
  Tensor2 r;
  for (int k = 0; k < 3; ++k) {
    const double s = std::sqrt(es.values[static_cast<std::size_t>(k)]);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        r(i, j) += s * es.vectors[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] *
                   es.vectors[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
  }
  return sym(r);
}

Tensor2 mat_exp(const Tensor2& x) {
  // bring the argument below 1/2, run the series, square back
  double nrm = frobenius_norm(x);
  int squarings = 0;
  Tensor2 arg = x;
  while (nrm > 0.5) {
    arg = 0.5 * arg;
    nrm *= 0.5;
    ++squarings;
  }
  Tensor2 sum = Tensor2::identity();
  Tensor2 term = Tensor2::identity();
  for (int k = 1; k <= 40; ++k) {
    term = (1.0 / k) * (term * arg);
    sum = sum + term;
    if (frobenius_norm(term) < tol::series_rel * frobenius_norm(sum)) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

SymVoigt6 voigt_pack(const Tensor2& x) {
  check_symmetric(x, "voigt_pack");
  return SymVoigt6{{x(0, 0), x(1, 1), x(2, 2), 0.5 * (x(0, 1) + x(1, 0)),
                    0.5 * (x(0, 2) + x(2, 0)), 0.5 * (x(1, 2) + x(2, 1))}};
}

Tensor2 voigt_unpack(const SymVoigt6& v) {
  Tensor2 r;
  r(0, 0) = v[0];
  r(1, 1) = v[1];
  r(2, 2) = v[2];
  r(0, 1) = r(1, 0) = v[3];
  r(0, 2) = r(2, 0) = v[4];
  r(1, 2) = r(2, 1) = v[5];
  return r;
}

bool is_spd(const Tensor2& x) {
  double skew = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) skew = std::max(skew, std::abs(x(i, j) - x(j, i)));
  if (skew > tol::sym_rel * std::max(frobenius_norm(x), 1e-300)) return false;
  // Sylvester criterion on leading principal minors
  if (x(0, 0) <= 0.0) return false;
  if (x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0) <= 0.0) return false;
  return det(x) > 0.0;
}

}  // namespace growsim
