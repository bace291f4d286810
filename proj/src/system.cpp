#include "lgb/system.hpp"

#include <complex>
#include <cstring>
#include <string>

namespace lgb {

namespace {

constexpr double kRankTol = 1e-10;

template <class M>
int rank_of(const M& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<M> svd(m);
  const auto& sv = svd.singularValues();
  if (!(sv(0) > 0.0)) return 0;
  int r = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > kRankTol * sv(0)) ++r;
  }
  return r;
}

Matrix stack_powers(const Matrix& a, const Matrix& c, int blocks) {
  const Index n = a.rows();
  Matrix out(c.rows() * blocks, n);
  Matrix block = c;
  for (int k = 0; k < blocks; ++k) {
    out.middleRows(k * c.rows(), c.rows()) = block;
    block = block * a;
  }
  return out;
}

SpdMatrix checked_spd(const Matrix& m, const char* what) {
  try {
    return SpdMatrix::symmetrized(m);
  } catch (const Error&) {
    throw Error(ErrorKind::DegenerateCovariance, what);
  }
}

void hash_bytes(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
}

void hash_matrix(std::uint64_t& h, const Matrix& m) {
  const std::int64_t dims[2] = {m.rows(), m.cols()};
  hash_bytes(h, dims, sizeof(dims));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      hash_bytes(h, &v, sizeof(v));
    }
  }
}

}  // namespace

SystemModel::SystemModel(Matrix a, Matrix b, Matrix c)
    : a_(std::move(a)),
      b_(std::move(b)),
      c_(std::move(c)),
      q_(SymMatrix::zero(1)),
      info_(SymMatrix::zero(1)) {
  const Index n = a_.rows();
  if (n == 0 || a_.cols() != n) throw Error(ErrorKind::DimensionMismatch, "A must be square");
  if (b_.rows() != n || b_.cols() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "B must have " + std::to_string(n) + " rows");
  }
  if (c_.cols() != n || c_.rows() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "C must have " + std::to_string(n) + " columns");
  }
  if (!a_.allFinite() || !b_.allFinite() || !c_.allFinite()) {
    throw Error(ErrorKind::DomainError, "model has non-finite entries");
  }
  q_ = SymMatrix::symmetrized(b_ * b_.transpose());
  info_ = SymMatrix::symmetrized(c_.transpose() * c_);
}

SystemModel SystemModel::scalar(double a, double b, double c) {
  return SystemModel(Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, b), Matrix::Constant(1, 1, c));
}

std::uint64_t SystemModel::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  hash_matrix(h, a_);
  hash_matrix(h, b_);
  hash_matrix(h, c_);
  return h;
}

int numerical_rank(const Matrix& m) { return rank_of(m); }

StructuralReport validate(const SystemModel& model) {
  const Index n = model.dim();
  const Matrix& a = model.A();
  StructuralReport r;
  r.a_invertible = rank_of(a) == n;

  // Controllability: [B AB ... A^{n-1}B] is the transpose of the stacked
  // observability matrix of (A^T, B^T).
  const Matrix ctrl = stack_powers(a.transpose(), model.B().transpose(), static_cast<int>(n));
  r.controllable = rank_of(ctrl) == n;

  for (int k = 1; k <= n; ++k) {
    if (rank_of(stack_powers(a, model.C(), k)) == n) {
      r.observability_index = k;
      break;
    }
  }
  r.observable = r.observability_index > 0;

  // PBH tests on the eigenvalues outside the open unit disc.
  using CMatrix = Eigen::MatrixXcd;
  Eigen::ComplexEigenSolver<CMatrix> es(a.cast<std::complex<double>>(), false);
  bool stab = true;
  bool detect = true;
  for (Index i = 0; i < n; ++i) {
    const std::complex<double> lambda = es.eigenvalues()(i);
    if (std::abs(lambda) < 1.0) continue;
    const CMatrix shifted = lambda * CMatrix::Identity(n, n) - a.cast<std::complex<double>>();
    CMatrix hor(n, n + model.B().cols());
    hor << shifted, model.B().cast<std::complex<double>>();
    if (rank_of(hor) < n) stab = false;
    CMatrix ver(n + model.C().rows(), n);
    ver << shifted, model.C().cast<std::complex<double>>();
    if (rank_of(ver) < n) detect = false;
  }
  r.stabilizable = r.controllable || stab;
  r.detectable = r.observable || detect;
  return r;
}

SpdMatrix map_h(const SystemModel& model, const SpdMatrix& p) {
  require_same_dim(model.dim(), p.dim(), "map_h");
  const Matrix& a = model.A();
  return checked_spd(a * p.matrix() * a.transpose() + model.Q().matrix(),
                     "A P A^T + Q is not positive definite");
}

SpdMatrix map_g(const SystemModel& model, const SpdMatrix& p) {
  const SpdMatrix predicted = map_h(model, p);
  // (S^{-1} + I)^{-1} = L (I + L^T I L)^{-1} L^T with S = L L^T; the middle factor is >= I.
  Eigen::LLT<Matrix> outer(predicted.matrix());
  if (outer.info() != Eigen::Success) throw Error(ErrorKind::DegenerateCovariance, "A P A^T + Q is not invertible");
  const Matrix l = outer.matrixL();
  const Index n = model.dim();
  const Matrix middle = Matrix::Identity(n, n) + l.transpose() * model.Info().matrix() * l;
  Eigen::LLT<Matrix> inner(middle);
  if (inner.info() != Eigen::Success) throw Error(ErrorKind::DegenerateCovariance, "posterior information is singular");
  const Matrix k = inner.matrixL().solve(l.transpose());
  return checked_spd(k.transpose() * k, "posterior covariance is not positive definite");
}

SymMatrix map_g_info(const SystemModel& model, const SymMatrix& y) {
  require_same_dim(model.dim(), y.dim(), "map_g_info");
  const Index n = model.dim();
  Eigen::FullPivLU<Matrix> lu(model.A());
  lu.setThreshold(kRankTol);
  if (!lu.isInvertible()) throw Error(ErrorKind::SingularDynamics, "A is singular");
  const Matrix a_inv = lu.inverse();
  const Matrix m = a_inv.transpose() * y.matrix() * a_inv;
  // (I + M Q)^{-1} M is the transpose of M (I + Q M)^{-1}.
  const Matrix lhs = Matrix::Identity(n, n) + m * model.Q().matrix();
  const Matrix xt = lhs.partialPivLu().solve(m);
  return SymMatrix::symmetrized(xt.transpose() + model.Info().matrix());
}

namespace {

SpdMatrix iterate_g(const SystemModel& model, SpdMatrix p, const FixedPointOptions& options) {
  for (int it = 0; it < options.max_iter; ++it) {
    SpdMatrix next = map_g(model, p);
    const double step = (next.matrix() - p.matrix()).norm();
    if (step <= options.tol * next.matrix().norm()) return next;
    p = std::move(next);
  }
  throw Error(ErrorKind::NoConvergence,
              "fixed point iteration exceeded " + std::to_string(options.max_iter) + " steps");
}

}  // namespace

SpdMatrix fixed_point(const SystemModel& model, const FixedPointOptions& options) {
  const StructuralReport report = validate(model);
  if (!report.detectable) throw Error(ErrorKind::StructuralError, "(A, C) is not detectable");
  const Index n = model.dim();
  SpdMatrix from_small = iterate_g(model, SpdMatrix::identity(n), options);
  const SpdMatrix from_large =
      iterate_g(model, SpdMatrix::symmetrized(100.0 * Matrix::Identity(n, n)), options);
  const double gap = (from_small.matrix() - from_large.matrix()).norm();
  if (gap > 1e-8 * from_small.matrix().norm()) {
    throw Error(ErrorKind::NoConvergence, "fixed point depends on the starting point");
  }
  return from_small;
}

SpdMatrix pessimist_reset(const SystemModel& model, int n) {
  if (n < 1) throw Error(ErrorKind::DomainError, "horizon must be at least 1");
  SymMatrix y = SymMatrix::zero(model.dim());
  for (int k = 0; k < n; ++k) y = map_g_info(model, y);
  const Vector ev = sym_eig(y).values;
  if (!(ev(ev.size() - 1) > 1e-12 * ev(0))) {
    throw Error(ErrorKind::NotObservableAtHorizon,
                "information matrix singular after " + std::to_string(n) + " steps");
  }
  return spd_inv(SpdMatrix(y));
}

SpdMatrix pessimist_reset(const SystemModel& model) {
  const int index = validate(model).observability_index;
  if (index == 0) throw Error(ErrorKind::NotObservableAtHorizon, "(A, C) is not observable");
  return pessimist_reset(model, index);
}

}  // namespace lgb
