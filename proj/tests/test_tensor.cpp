#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "growsim/tensor.hpp"
#include "oracles.hpp"

using namespace growsim;

namespace {
double rel_err(const Tensor2& got, const Tensor2& want) {
  return frobenius_norm(got - want) / std::max(frobenius_norm(want), 1e-300);
}
}  // namespace

TEST_CASE("invert: identity and diagonal") {
  CHECK(rel_err(invert(Tensor2::identity()), Tensor2::identity()) == 0.0);
  const Tensor2 d = Tensor2::diag(2.0, 4.0, 5.0);
  const Tensor2 di = invert(d);
  CHECK(di(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(di(1, 1) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(di(2, 2) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("invert: residual bound on random well-conditioned matrices") {
  oracles::Rng rng(101);
  for (int k = 0; k < 100; ++k) {
    // rotation plus diagonal keeps the condition number moderate
    const Tensor2 q = rng.rotation();
    const Tensor2 a = transpose(q) * (Tensor2::diag(rng.uniform(0.5, 3.0), rng.uniform(0.5, 3.0),
                                                    rng.uniform(0.5, 3.0)) *
                                      q) +
                      0.1 * rng.matrix();
    const Tensor2 r = a * invert(a);
    CHECK(frobenius_norm(r - Tensor2::identity()) < 1e-12);
  }
}

TEST_CASE("invert: singular input throws") {
  Tensor2 s;
  s(0, 0) = 1.0;
  s(1, 1) = 1.0;  // rank 2
  CHECK_THROWS_AS((void)invert(s), std::invalid_argument);
}

TEST_CASE("deviator: identity, uniaxial, random trace") {
  CHECK(frobenius_norm(deviator(Tensor2::identity())) == 0.0);
  const Tensor2 u = deviator(Tensor2::diag(3.0, 0.0, 0.0));
  CHECK(u(0, 0) == doctest::Approx(2.0));
  CHECK(u(1, 1) == doctest::Approx(-1.0));
  CHECK(u(2, 2) == doctest::Approx(-1.0));
  oracles::Rng rng(7);
  for (int k = 0; k < 50; ++k) {
    const Tensor2 a = rng.matrix(-5.0, 5.0);
    CHECK(std::abs(trace(deviator(a))) < 1e-12 * frobenius_norm(a));
  }
}

TEST_CASE("frobenius_norm basics") {
  CHECK(frobenius_norm(Tensor2::zero()) == 0.0);
  CHECK(frobenius_norm(Tensor2::identity()) == doctest::Approx(std::sqrt(3.0)));
  CHECK(frobenius_norm(Tensor2::diag(3.0, 4.0, 0.0)) == doctest::Approx(5.0));
}

TEST_CASE("sym_sqrt: identity, diagonal, reconstruction property") {
  CHECK(rel_err(sym_sqrt(Tensor2::identity()), Tensor2::identity()) < 1e-15);
  const Tensor2 r = sym_sqrt(Tensor2::diag(4.0, 9.0, 16.0));
  CHECK(rel_err(r, Tensor2::diag(2.0, 3.0, 4.0)) < 1e-14);

  oracles::Rng rng(33);
  for (int k = 0; k < 1000; ++k) {
    const Tensor2 a = rng.spd(0.1, 10.0);
    const Tensor2 s = sym_sqrt(a);
    CHECK(is_spd(s));
    CHECK(rel_err(s * s, a) < 1e-10);
  }
}

TEST_CASE("sym_sqrt: non-SPD input reports smallest eigenvalue") {
  try {
    (void)sym_sqrt(Tensor2::diag(1.0, 2.0, -3.0));
    FAIL("expected throw");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("-3") != std::string::npos);
  }
}

TEST_CASE("mat_exp: zero, diagonal, series oracle") {
  CHECK(rel_err(mat_exp(Tensor2::zero()), Tensor2::identity()) == 0.0);
  const Tensor2 e = mat_exp(Tensor2::diag(1.0, 2.0, 3.0));
  CHECK(e(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK(e(1, 1) == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
  CHECK(e(2, 2) == doctest::Approx(std::exp(3.0)).epsilon(1e-14));

  oracles::Rng rng(55);
  for (int k = 0; k < 200; ++k) {
    Tensor2 a = rng.matrix();
    const double n = frobenius_norm(a);
    if (n > 2.0) a = (2.0 / n) * a;
    CHECK(rel_err(mat_exp(a), oracles::mat_exp_series_ld(a)) < 1e-12);
  }
}

TEST_CASE("mat_exp: inverse identity and determinant identity") {
  oracles::Rng rng(56);
  for (int k = 0; k < 1000; ++k) {
    Tensor2 a = rng.matrix(-2.0, 2.0);
    const double n = frobenius_norm(a);
    if (n > 5.0) a = (5.0 / n) * a;
    const Tensor2 e = mat_exp(a);
    const Tensor2 em = mat_exp(-1.0 * a);
    CHECK(frobenius_norm(e * em - Tensor2::identity()) < 1e-10);
    CHECK(std::abs(det(e) - std::exp(trace(a))) < 1e-10 * std::exp(trace(a)));
  }
}

TEST_CASE("voigt pack/unpack: ordering and round trip") {
  const SymVoigt6 vi = voigt_pack(Tensor2::identity());
  CHECK(vi[0] == 1.0);
  CHECK(vi[1] == 1.0);
  CHECK(vi[2] == 1.0);
  CHECK(vi[3] == 0.0);
  CHECK(vi[4] == 0.0);
  CHECK(vi[5] == 0.0);

  Tensor2 a = Tensor2::identity();
  a(0, 1) = a(1, 0) = 7.0;
  CHECK(voigt_pack(a)[3] == 7.0);

  oracles::Rng rng(77);
  for (int k = 0; k < 200; ++k) {
    const Tensor2 s = rng.symmetric(-3.0, 3.0);
    const Tensor2 roundtrip = voigt_unpack(voigt_pack(s));
    for (int i = 0; i < 9; ++i) CHECK(roundtrip.a[i] == s.a[i]);
  }

  Tensor2 bad = Tensor2::identity();
  bad(0, 1) = 1.0;  // leaves (1,0) = 0
  CHECK_THROWS_AS((void)voigt_pack(bad), std::invalid_argument);
}

TEST_CASE("sym_eig: trivial spectra and reconstruction") {
  const EigenSystem ei = sym_eig(Tensor2::identity());
  CHECK(ei.values[0] == doctest::Approx(1.0));
  CHECK(ei.values[2] == doctest::Approx(1.0));

  const EigenSystem ed = sym_eig(Tensor2::diag(5.0, 2.0, -1.0));
  CHECK(ed.values[0] == doctest::Approx(5.0));
  CHECK(ed.values[1] == doctest::Approx(2.0));
  CHECK(ed.values[2] == doctest::Approx(-1.0));

  oracles::Rng rng(88);
  for (int k = 0; k < 500; ++k) {
    const Tensor2 a = rng.symmetric(-4.0, 4.0);
    const EigenSystem es = sym_eig(a);
    CHECK(es.values[0] >= es.values[1]);
    CHECK(es.values[1] >= es.values[2]);
    Tensor2 rec;
    for (int m = 0; m < 3; ++m)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          rec(i, j) += es.values[m] * es.vectors[m][i] * es.vectors[m][j];
    CHECK(frobenius_norm(rec - a) < 1e-10 * std::max(frobenius_norm(a), 1.0));
    // orthonormality
    for (int m = 0; m < 3; ++m)
      for (int n = 0; n < 3; ++n) {
        double dot = 0.0;
        for (int i = 0; i < 3; ++i) dot += es.vectors[m][i] * es.vectors[n][i];
        CHECK(std::abs(dot - (m == n ? 1.0 : 0.0)) < 1e-10);
      }
    // eigen residual
    for (int m = 0; m < 3; ++m) {
      double res = 0.0;
      for (int i = 0; i < 3; ++i) {
        double av = 0.0;
        for (int j = 0; j < 3; ++j) av += a(i, j) * es.vectors[m][j];
        const double d = av - es.values[m] * es.vectors[m][i];
        res += d * d;
      }
      CHECK(std::sqrt(res) < 1e-10 * std::max(frobenius_norm(a), 1.0));
    }
  }
}
