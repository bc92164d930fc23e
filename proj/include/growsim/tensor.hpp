#pragma once

#include <array>
#include <cstddef>

// Dense 3x3 tensor algebra for the material and element kernels.
// Voigt ordering throughout: (11, 22, 33, 12, 13, 23).

namespace growsim {

namespace tol {
inline constexpr double det_eps = 1e-14;        // singularity guard, scaled by norm^3
inline constexpr double sym_rel = 1e-12;        // symmetry precondition, relative
inline constexpr double series_rel = 1e-16;     // exp series truncation, relative
inline constexpr double eig_rel = 1e-15;        // Jacobi off-diagonal target, relative
}  // namespace tol

struct Tensor2 {
  // row-major components
  std::array<double, 9> a{};

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(3 * i + j)]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(3 * i + j)]; }

  static Tensor2 identity();
  static Tensor2 zero() { return Tensor2{}; }
  static Tensor2 diag(double d0, double d1, double d2);
};

Tensor2 operator+(const Tensor2& x, const Tensor2& y);
Tensor2 operator-(const Tensor2& x, const Tensor2& y);
Tensor2 operator*(double s, const Tensor2& x);
Tensor2 operator*(const Tensor2& x, const Tensor2& y);  // matrix product

Tensor2 transpose(const Tensor2& x);
double trace(const Tensor2& x);
double det(const Tensor2& x);
Tensor2 sym(const Tensor2& x);

// Symmetric tensor stored as (11,22,33,12,13,23).
struct SymVoigt6 {
  std::array<double, 6> v{};

  double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }

  static SymVoigt6 identity() { return SymVoigt6{{1.0, 1.0, 1.0, 0.0, 0.0, 0.0}}; }
};

// 6x6 tangent in Voigt ordering. Columns follow the engineering
// Green-Lagrange strain convention (shear slots carry 2*E_ij), so
// dS_voigt = T * dE_voigt. No major symmetry is assumed.
struct Tangent66 {
  std::array<double, 36> m{};

  double& operator()(int i, int j) { return m[static_cast<std::size_t>(6 * i + j)]; }
  double operator()(int i, int j) const { return m[static_cast<std::size_t>(6 * i + j)]; }
};

struct EigenSystem {
  std::array<double, 3> values{};                 // sorted descending
  std::array<std::array<double, 3>, 3> vectors{};  // vectors[k] pairs with values[k], orthonormal
};

// Inverse by adjugate. Throws std::invalid_argument when |det| <= det_eps * norm^3.
Tensor2 invert(const Tensor2& x);

// x - tr(x)/3 * I
Tensor2 deviator(const Tensor2& x);

double frobenius_norm(const Tensor2& x);

// Eigendecomposition of a symmetric tensor by cyclic Jacobi sweeps.
EigenSystem sym_eig(const Tensor2& x);

// Principal square root of a symmetric positive definite tensor.
// Throws std::invalid_argument for non-SPD input (message carries the smallest eigenvalue).
Tensor2 sym_sqrt(const Tensor2& x);

// Matrix exponential of a general (possibly nonsymmetric) tensor via
// scaling-and-squaring with a truncated series.
Tensor2 mat_exp(const Tensor2& x);

// Pack requires symmetry within sym_rel (relative); unpack(pack(x)) == x exactly.
SymVoigt6 voigt_pack(const Tensor2& x);
Tensor2 voigt_unpack(const SymVoigt6& v);

bool is_spd(const Tensor2& x);

}  // namespace growsim
