#pragma once

// Matrix functions on the cone of symmetric positive-definite matrices.
//
// Everything here is routed through a single symmetric eigendecomposition;
// no series expansions are used. Dimensions are small (n <= ~10).

#include <Eigen/Dense>

#include "lgb/error.hpp"

namespace lgb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// A symmetric matrix with no definiteness requirement (tangent vectors,
/// matrix logarithms, information matrices that may be singular).
class SymMatrix {
 public:
  /// Rejects input whose asymmetry exceeds 1e-12 * max(1, ||m||_F), then
  /// stores the symmetric part.
  explicit SymMatrix(const Matrix& m);

  static SymMatrix zero(Index dim);
  static SymMatrix identity(Index dim);
  /// Symmetric part of `m` without the asymmetry check. For results of
  /// computations that are symmetric up to rounding.
  static SymMatrix symmetrized(const Matrix& m);

  [[nodiscard]] Index dim() const noexcept { return m_.rows(); }
  [[nodiscard]] const Matrix& matrix() const noexcept { return m_; }
  [[nodiscard]] double operator()(Index i, Index j) const { return m_(i, j); }

 private:
  struct Trusted {};
  SymMatrix(Matrix m, Trusted) : m_(std::move(m)) {}

  Matrix m_;
};

/// A symmetric positive-definite matrix. Construction symmetrizes and then
/// requires lambda_min > 1e-12 * lambda_max.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Matrix& m);
  explicit SpdMatrix(const SymMatrix& s);

  static SpdMatrix identity(Index dim);
  static SpdMatrix diagonal(const Vector& d);
  static SpdMatrix scalar(double value);
  /// Symmetric part of `m`, checked for positive-definiteness only.
  static SpdMatrix symmetrized(const Matrix& m);

  [[nodiscard]] Index dim() const noexcept { return s_.dim(); }
  [[nodiscard]] const Matrix& matrix() const noexcept { return s_.matrix(); }
  [[nodiscard]] const SymMatrix& sym() const noexcept { return s_; }
  [[nodiscard]] double operator()(Index i, Index j) const { return s_(i, j); }

  [[nodiscard]] bool operator==(const SpdMatrix& other) const {
    return dim() == other.dim() && matrix() == other.matrix();
  }

 private:
  struct Validate {};
  SpdMatrix(SymMatrix s, Validate);

  SymMatrix s_;
};

struct SymEig {
  Vector values;  ///< descending
  Matrix basis;   ///< orthogonal, columns are eigenvectors
};

SymEig sym_eig(const SymMatrix& s);

SpdMatrix spd_sqrt(const SpdMatrix& p);
/// P^{-1/2}.
SpdMatrix spd_inv_sqrt(const SpdMatrix& p);
SymMatrix spd_log(const SpdMatrix& p);
SpdMatrix sym_exp(const SymMatrix& s);
/// P^t for real t.
SpdMatrix spd_pow(const SpdMatrix& p, double t);

/// Throws IllConditioned when cond(P) > 1e14.
SpdMatrix spd_inv(const SpdMatrix& p);

/// M P M^T. Throws SingularTransform if M is (numerically) singular.
SpdMatrix congruence(const Matrix& m, const SpdMatrix& p);

/// Canonical whitening transform P^{-1/2}, so that congruence(W, P) = I.
Matrix whitener(const SpdMatrix& p);

/// Eigenvalues of P1 P2^{-1}, descending. Eigenvalues >= 1 come from the
/// symmetric congruence L^{-1} P1 L^{-T} (L the Cholesky factor of P2), the
/// rest are reciprocals from the swapped congruence.
Vector gen_eigenvalues(const SpdMatrix& p1, const SpdMatrix& p2);

/// True iff lambda_min(b - a) >= -tol * max(1, ||b||_2).
bool loewner_leq(const SymMatrix& a, const SymMatrix& b, double tol = 0.0);
bool loewner_leq(const SpdMatrix& a, const SpdMatrix& b, double tol = 0.0);

/// Largest singular value.
double spectral_norm(const Matrix& m);
double condition_number(const SpdMatrix& p);
double log_det(const SpdMatrix& p);

void require_same_dim(Index a, Index b, const char* what);

}  // namespace lgb
