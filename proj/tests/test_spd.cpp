#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lgb/random.hpp"
#include "lgb/spd.hpp"
#include "support.hpp"

using namespace lgb;
using lgb::test::diag;
using lgb::test::mat;
using lgb::test::rel_err;

TEST_CASE("construction rejects asymmetric and indefinite input") {
  CHECK_THROWS_AS(SymMatrix(mat({{1, 2}, {0, 1}})), Error);
  try {
    SpdMatrix(mat({{1, 2}, {2, 1}}));
    FAIL("indefinite matrix accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotPositiveDefinite);
  }
  // Rounding-level asymmetry is absorbed.
  const SpdMatrix p(mat({{2, 1 + 1e-15}, {1, 2}}));
  CHECK(p(0, 1) == p(1, 0));
}

TEST_CASE("sym_eig") {
  SUBCASE("identity") {
    const SymEig e = sym_eig(SymMatrix::identity(2));
    CHECK(e.values(0) == doctest::Approx(1.0));
    CHECK(e.values(1) == doctest::Approx(1.0));
  }
  SUBCASE("diagonal is sorted descending with a permutation basis") {
    const SymEig e = sym_eig(SymMatrix(mat({{4, 0}, {0, 9}})));
    CHECK(e.values(0) == doctest::Approx(9.0));
    CHECK(e.values(1) == doctest::Approx(4.0));
    CHECK(std::abs(e.basis(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(e.basis(0, 1)) == doctest::Approx(1.0));
  }
  SUBCASE("random reconstruction") {
    Rng rng(11);
    for (int t = 0; t < 200; ++t) {
      const Index n = 1 + t % 6;
      const SymMatrix s = random_symmetric(rng, n);
      const SymEig e = sym_eig(s);
      const Matrix back = e.basis * e.values.asDiagonal() * e.basis.transpose();
      CHECK((back - s.matrix()).norm() <= 1e-10 * s.matrix().norm());
      CHECK((e.basis.transpose() * e.basis - Matrix::Identity(n, n)).norm() <= 1e-10);
      for (Index i = 1; i < n; ++i) CHECK(e.values(i - 1) >= e.values(i));
    }
  }
}

TEST_CASE("square root, log, exp and inverse on diagonal inputs") {
  CHECK(spd_sqrt(SpdMatrix::identity(3)).matrix().isApprox(Matrix::Identity(3, 3)));
  CHECK(rel_err(spd_sqrt(diag({4, 9})).matrix(), diag({2, 3}).matrix()) < 1e-15);
  CHECK(spd_log(SpdMatrix::identity(2)).matrix().norm() == 0.0);
  const double e = std::numbers::e;
  CHECK(rel_err(spd_log(diag({e, e * e})).matrix(), mat({{1, 0}, {0, 2}})) < 1e-15);
  CHECK(rel_err(spd_inv(diag({2, 4})).matrix(), mat({{0.5, 0}, {0, 0.25}})) < 1e-15);
  CHECK(spd_inv(SpdMatrix::identity(2)).matrix().isApprox(Matrix::Identity(2, 2)));
}

TEST_CASE("near-singular input never reaches spd_inv") {
  // Validation caps the condition number at 1e12, below the inversion guard.
  try {
    spd_inv(diag({1.0, 1e-15}));
    FAIL("expected NotPositiveDefinite");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotPositiveDefinite);
  }
  const SpdMatrix inv = spd_inv(diag({1.0, 1e-11}));
  CHECK(inv(1, 1) == doctest::Approx(1e11).epsilon(1e-14));
}

TEST_CASE("round trips on random SPD matrices") {
  Rng rng(2024);
  for (int t = 0; t < 1000; ++t) {
    const Index n = 1 + t % 6;
    const SpdMatrix p = random_spd(rng, n);
    const Matrix r = spd_sqrt(p).matrix();
    CHECK(rel_err(r * r, p.matrix()) <= 1e-9);
    CHECK(rel_err(sym_exp(spd_log(p)).matrix(), p.matrix()) <= 1e-9);
    const double cond = condition_number(p);
    CHECK((p.matrix() * spd_inv(p).matrix() - Matrix::Identity(n, n)).norm() <= 1e-10 * cond);
  }
}

TEST_CASE("congruence") {
  const SpdMatrix p = diag({3, 5});
  CHECK(congruence(Matrix::Identity(2, 2), p) == p);
  CHECK(congruence(mat({{2, 0}, {0, 1}}), SpdMatrix::identity(2)).matrix().isApprox(mat({{4, 0}, {0, 1}})));
  try {
    congruence(mat({{1, 2}, {2, 4}}), p);
    FAIL("expected SingularTransform");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularTransform);
  }
  Rng rng(5);
  for (int t = 0; t < 1000; ++t) {
    const Index n = 1 + t % 5;
    const Matrix m = random_invertible(rng, n, 1e4);
    const SpdMatrix q = random_spd(rng, n);
    // Construction of the result is itself the SPD check.
    const SpdMatrix out = congruence(m, q);
    CHECK(out.dim() == n);
  }
}

TEST_CASE("whitener") {
  CHECK(whitener(SpdMatrix::identity(2)).isApprox(Matrix::Identity(2, 2)));
  CHECK(rel_err(whitener(diag({4, 9})), mat({{0.5, 0}, {0, 1.0 / 3.0}})) < 1e-15);
  Rng rng(9);
  for (int t = 0; t < 200; ++t) {
    const SpdMatrix p = random_spd(rng, 1 + t % 5);
    const Matrix w = whitener(p);
    CHECK((w * p.matrix() * w.transpose() - Matrix::Identity(p.dim(), p.dim())).norm() <= 1e-10 * condition_number(p));
  }
}

TEST_CASE("generalized eigenvalues") {
  const SpdMatrix p = diag({2, 7});
  const Vector same = gen_eigenvalues(p, p);
  CHECK(same(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(same(1) == doctest::Approx(1.0).epsilon(1e-14));
  const Vector ev = gen_eigenvalues(diag({4, 9}), SpdMatrix::identity(2));
  CHECK(ev(0) == doctest::Approx(9.0));
  CHECK(ev(1) == doctest::Approx(4.0));
  CHECK_THROWS_AS(gen_eigenvalues(p, SpdMatrix::identity(3)), Error);

  Rng rng(77);
  for (int t = 0; t < 500; ++t) {
    const Index n = 1 + t % 5;
    const SpdMatrix p1 = random_spd(rng, n, 1e4);
    const SpdMatrix p2 = random_spd(rng, n, 1e4);
    const Vector lambda = gen_eigenvalues(p1, p2);
    const double det_ratio = p1.matrix().determinant() / p2.matrix().determinant();
    CHECK(rel_err(lambda.prod(), det_ratio) <= 1e-8);
    // Spectrum of P1 P2^{-1} is invariant under a common congruence.
    const Matrix m = random_invertible(rng, n, 10.0);
    const Vector moved = gen_eigenvalues(congruence(m, p1), congruence(m, p2));
    for (Index i = 0; i < n; ++i) CHECK(rel_err(moved(i), lambda(i)) <= 1e-8);
  }
}

TEST_CASE("Loewner order") {
  const SpdMatrix p = diag({1, 3});
  CHECK(loewner_leq(p, p, 0.0));
  const SpdMatrix i2 = SpdMatrix::identity(2);
  const SpdMatrix two = diag({2, 2});
  CHECK(loewner_leq(i2, two, 0.0));
  CHECK_FALSE(loewner_leq(two, i2, 0.0));
  CHECK_FALSE(loewner_leq(diag({1, 3}), diag({2, 2}), 0.0));
  CHECK_FALSE(loewner_leq(diag({2, 2}), diag({1, 3}), 0.0));

  Rng rng(3);
  for (int t = 0; t < 300; ++t) {
    const Index n = 2 + t % 4;
    const SpdMatrix a = random_spd(rng, n);
    const Vector d1 = rng.normal_matrix(n, 1);
    const Vector d2 = rng.normal_matrix(n, 1);
    const SpdMatrix b = SpdMatrix::symmetrized(a.matrix() + d1 * d1.transpose());
    const SpdMatrix c = SpdMatrix::symmetrized(b.matrix() + d2 * d2.transpose());
    CHECK(loewner_leq(a, b, 1e-12));
    CHECK(loewner_leq(b, c, 1e-12));
    CHECK(loewner_leq(a, c, 1e-12));  // transitivity
    // Antisymmetry up to tolerance: b <= a would force b == a.
    if (loewner_leq(b, a, 1e-12)) CHECK((a.matrix() - b.matrix()).norm() <= 1e-10 * b.matrix().norm());
  }
}
