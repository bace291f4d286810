#include "lgb/random.hpp"

namespace lgb {

Matrix Rng::normal_matrix(Index rows, Index cols) {
  Matrix m(rows, cols);
  // Fill in row-major order so the draw sequence is layout independent.
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = normal();
  }
  return m;
}

SpdMatrix random_spd(Rng& rng, Index dim, double max_condition) {
  for (;;) {
    const Matrix m = rng.normal_matrix(dim, dim);
    const Matrix p = m * m.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (p + p.transpose()), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0);
    const double hi = es.eigenvalues()(dim - 1);
    if (lo > 0.0 && hi / lo <= max_condition) return SpdMatrix::symmetrized(p);
  }
}

Matrix random_invertible(Rng& rng, Index dim, double max_condition) {
  for (;;) {
    Matrix m = rng.normal_matrix(dim, dim);
    Eigen::JacobiSVD<Matrix> svd(m);
    const Vector& sv = svd.singularValues();
    if (sv(dim - 1) > 0.0 && sv(0) / sv(dim - 1) <= max_condition) return m;
  }
}

SymMatrix random_symmetric(Rng& rng, Index dim) {
  Matrix m(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = i; j < dim; ++j) {
      m(i, j) = rng.normal();
      m(j, i) = m(i, j);
    }
  }
  return SymMatrix(m);
}

}  // namespace lgb
