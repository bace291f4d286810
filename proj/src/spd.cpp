#include "lgb/spd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lgb {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kDefiniteTol = 1e-12;
constexpr double kMaxCondition = 1e14;

template <class F>
Matrix apply_spectral(const SymEig& e, F&& f) {
  Vector mapped = e.values.unaryExpr(f);
  return e.basis * mapped.asDiagonal() * e.basis.transpose();
}

Matrix symmetric_part(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

// SymMatrix ----------------------------------------------------------------

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "symmetric matrix must be square and non-empty");
  }
  if (!m.allFinite()) {
    throw Error(ErrorKind::NotSymmetric, "matrix has non-finite entries");
  }
  const double scale = std::max(1.0, m.norm());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol * scale) {
    throw Error(ErrorKind::NotSymmetric, "asymmetry " + std::to_string(asym));
  }
  m_ = symmetric_part(m);
}

SymMatrix SymMatrix::zero(Index dim) { return SymMatrix(Matrix::Zero(dim, dim), Trusted{}); }

SymMatrix SymMatrix::identity(Index dim) {
  return SymMatrix(Matrix::Identity(dim, dim), Trusted{});
}

SymMatrix SymMatrix::symmetrized(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "symmetric matrix must be square and non-empty");
  }
  return SymMatrix(symmetric_part(m), Trusted{});
}

// SpdMatrix ----------------------------------------------------------------

SpdMatrix::SpdMatrix(SymMatrix s, Validate) : s_(std::move(s)) {
  const Matrix& m = s_.matrix();
  if (!m.allFinite()) {
    throw Error(ErrorKind::NotPositiveDefinite, "matrix has non-finite entries");
  }
  if (m.rows() == 1) {
    if (!(m(0, 0) > 0.0)) {
      throw Error(ErrorKind::NotPositiveDefinite, "scalar " + std::to_string(m(0, 0)));
    }
    return;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
  if (!(lo > kDefiniteTol * hi)) {
    throw Error(ErrorKind::NotPositiveDefinite, "smallest eigenvalue " + std::to_string(lo));
  }
}

SpdMatrix::SpdMatrix(const Matrix& m) : SpdMatrix(SymMatrix(m), Validate{}) {}
SpdMatrix::SpdMatrix(const SymMatrix& s) : SpdMatrix(s, Validate{}) {}

SpdMatrix SpdMatrix::identity(Index dim) { return SpdMatrix(SymMatrix::identity(dim), Validate{}); }

SpdMatrix SpdMatrix::diagonal(const Vector& d) {
  return SpdMatrix(SymMatrix::symmetrized(d.asDiagonal().toDenseMatrix()), Validate{});
}

SpdMatrix SpdMatrix::scalar(double value) {
  return SpdMatrix(SymMatrix::symmetrized(Matrix::Constant(1, 1, value)), Validate{});
}

SpdMatrix SpdMatrix::symmetrized(const Matrix& m) { return SpdMatrix(SymMatrix::symmetrized(m), Validate{}); }

// Spectral functions -------------------------------------------------------

SymEig sym_eig(const SymMatrix& s) {
  const Index n = s.dim();
  if (n == 1) {
    return {Vector::Constant(1, s(0, 0)), Matrix::Identity(1, 1)};
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(s.matrix());
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::NoConvergence, "symmetric eigensolver failed");
  }
  // Eigen returns ascending order.
  SymEig out{es.eigenvalues().reverse(), es.eigenvectors().rowwise().reverse()};
  return out;
}

SpdMatrix spd_sqrt(const SpdMatrix& p) {
  return SpdMatrix::symmetrized(apply_spectral(sym_eig(p.sym()), [](double x) { return std::sqrt(x); }));
}

SpdMatrix spd_inv_sqrt(const SpdMatrix& p) {
  return SpdMatrix::symmetrized(
      apply_spectral(sym_eig(p.sym()), [](double x) { return 1.0 / std::sqrt(x); }));
}

SymMatrix spd_log(const SpdMatrix& p) {
  return SymMatrix::symmetrized(apply_spectral(sym_eig(p.sym()), [](double x) { return std::log(x); }));
}

SpdMatrix sym_exp(const SymMatrix& s) {
  return SpdMatrix::symmetrized(apply_spectral(sym_eig(s), [](double x) { return std::exp(x); }));
}

SpdMatrix spd_pow(const SpdMatrix& p, double t) {
  return SpdMatrix::symmetrized(
      apply_spectral(sym_eig(p.sym()), [t](double x) { return std::pow(x, t); }));
}

SpdMatrix spd_inv(const SpdMatrix& p) {
  const SymEig e = sym_eig(p.sym());
  const double cond = e.values(0) / e.values(e.values.size() - 1);
  if (cond > kMaxCondition) {
    throw Error(ErrorKind::IllConditioned, "condition number " + std::to_string(cond));
  }
  return SpdMatrix::symmetrized(apply_spectral(e, [](double x) { return 1.0 / x; }));
}

SpdMatrix congruence(const Matrix& m, const SpdMatrix& p) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "congruence transform must be square");
  }
  require_same_dim(m.rows(), p.dim(), "congruence");
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(sv.size() - 1) <= 1e-14 * sv(0)) {
    throw Error(ErrorKind::SingularTransform, "transform is singular");
  }
  try {
    return SpdMatrix::symmetrized(m * p.matrix() * m.transpose());
  } catch (const Error&) {
    throw Error(ErrorKind::SingularTransform, "transform too close to singular");
  }
}

Matrix whitener(const SpdMatrix& p) { return spd_inv_sqrt(p).matrix(); }

namespace {

// Eigenvalues of L^{-1} P1 L^{-T}, L = chol(P2), descending.
Vector congruence_spectrum(const Matrix& p1, const Matrix& p2) {
  Eigen::LLT<Matrix> llt(p2);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::NotPositiveDefinite, "Cholesky factorization failed");
  }
  const auto lower = llt.matrixL();
  const Matrix z = lower.solve(p1);
  const Matrix x = lower.solve(z.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric_part(x), Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

}  // namespace

Vector gen_eigenvalues(const SpdMatrix& p1, const SpdMatrix& p2) {
  require_same_dim(p1.dim(), p2.dim(), "gen_eigenvalues");
  if (p1.dim() == 1) {
    return Vector::Constant(1, p1(0, 0) / p2(0, 0));
  }
  // Each side resolves its large eigenvalues to full relative accuracy; the
  // small ones are taken as reciprocals from the swapped problem.
  const Vector mu = congruence_spectrum(p1.matrix(), p2.matrix());
  const Vector nu = congruence_spectrum(p2.matrix(), p1.matrix());
  const Index n = mu.size();
  Vector out(n);
  for (Index i = 0; i < n; ++i) out(i) = mu(i) >= 1.0 ? mu(i) : 1.0 / nu(n - 1 - i);
  return out;
}

bool loewner_leq(const SymMatrix& a, const SymMatrix& b, double tol) {
  require_same_dim(a.dim(), b.dim(), "loewner_leq");
  const SymMatrix diff = SymMatrix::symmetrized(b.matrix() - a.matrix());
  const Vector ev = sym_eig(diff).values;
  const double scale = std::max(1.0, spectral_norm(b.matrix()));
  return ev(ev.size() - 1) >= -tol * scale;
}

bool loewner_leq(const SpdMatrix& a, const SpdMatrix& b, double tol) {
  return loewner_leq(a.sym(), b.sym(), tol);
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double condition_number(const SpdMatrix& p) {
  const Vector ev = sym_eig(p.sym()).values;
  return ev(0) / ev(ev.size() - 1);
}

double log_det(const SpdMatrix& p) {
  return sym_eig(p.sym()).values.array().log().sum();
}

}  // namespace lgb
