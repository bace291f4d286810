#include "lgb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace lgb {

std::string_view to_string(MetricKind kind) noexcept {
  switch (kind) {
    case MetricKind::FlatCov: return "flat-cov";
    case MetricKind::FlatInfo: return "flat-info";
    case MetricKind::FlatSqrt: return "flat-sqrt";
    case MetricKind::AffineInvariant: return "affine";
  }
  return "unknown";
}

MetricKind parse_metric_kind(std::string_view token) {
  for (MetricKind kind : kAllMetrics) {
    if (token == to_string(kind)) return kind;
  }
  throw Error(ErrorKind::DomainError, "unknown metric '" + std::string(token) + "'");
}

namespace {

// Lexicographic order on the entries; used to evaluate d(P1, P2) and
// d(P2, P1) along the same floating-point path.
bool entries_less(const SpdMatrix& a, const SpdMatrix& b) {
  const Matrix& x = a.matrix();
  const Matrix& y = b.matrix();
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      if (x(i, j) != y(i, j)) return x(i, j) < y(i, j);
    }
  }
  return false;
}

double affine_distance(const SpdMatrix& p1, const SpdMatrix& p2) {
  const Vector lambda = gen_eigenvalues(p1, p2);
  return std::sqrt(lambda.array().log().square().sum());
}

Matrix chart(MetricKind kind, const SpdMatrix& p) {
  switch (kind) {
    case MetricKind::FlatCov: return p.matrix();
    case MetricKind::FlatInfo: return spd_inv(p).matrix();
    case MetricKind::FlatSqrt: return spd_sqrt(p).matrix();
    case MetricKind::AffineInvariant: break;
  }
  throw Error(ErrorKind::DomainError, "affine metric has no flat chart");
}

}  // namespace

double distance(MetricKind kind, const SpdMatrix& p1, const SpdMatrix& p2) {
  require_same_dim(p1.dim(), p2.dim(), "distance");
  if (p1 == p2) return 0.0;
  const bool swap = entries_less(p2, p1);
  const SpdMatrix& a = swap ? p2 : p1;
  const SpdMatrix& b = swap ? p1 : p2;
  if (kind == MetricKind::AffineInvariant) return affine_distance(a, b);
  return (chart(kind, a) - chart(kind, b)).norm();
}

double fisher_metric(const SpdMatrix& p, const SymMatrix& x, const SymMatrix& y) {
  require_same_dim(p.dim(), x.dim(), "fisher_metric");
  require_same_dim(p.dim(), y.dim(), "fisher_metric");
  Eigen::LLT<Matrix> llt(p.matrix());
  const Matrix px = llt.solve(x.matrix());
  const Matrix py = llt.solve(y.matrix());
  return 0.5 * (px * py).trace();
}

SpdMatrix geodesic(const SpdMatrix& p1, const SpdMatrix& p2, double t) {
  require_same_dim(p1.dim(), p2.dim(), "geodesic");
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorKind::DomainError, "geodesic parameter outside [0, 1]");
  }
  if (t == 0.0) return p1;
  if (t == 1.0) return p2;
  const SpdMatrix root = spd_sqrt(p1);
  const Matrix inv_root = spd_inv_sqrt(p1).matrix();
  const SpdMatrix inner = congruence(inv_root, p2);
  return congruence(root.matrix(), spd_pow(inner, t));
}

double curve_length(MetricKind kind, std::span<const SpdMatrix> samples, double tensor_scale) {
  const std::size_t k = samples.size();
  if (k < 2) throw Error(ErrorKind::DomainError, "curve needs at least two samples");
  const double dt = 1.0 / static_cast<double>(k - 1);

  std::vector<Matrix> coords;
  coords.reserve(k);
  for (const SpdMatrix& p : samples) {
    coords.push_back(kind == MetricKind::AffineInvariant ? p.matrix() : chart(kind, p));
  }

  auto velocity = [&](std::size_t i) -> Matrix {
    if (i == 0) return (coords[1] - coords[0]) / dt;
    if (i == k - 1) return (coords[k - 1] - coords[k - 2]) / dt;
    return (coords[i + 1] - coords[i - 1]) / (2.0 * dt);
  };

  std::vector<double> speed(k);
  for (std::size_t i = 0; i < k; ++i) {
    const Matrix v = velocity(i);
    if (kind == MetricKind::AffineInvariant) {
      const SymMatrix vs = SymMatrix::symmetrized(v);
      speed[i] = std::sqrt(std::max(0.0, tensor_scale * fisher_metric(samples[i], vs, vs)));
    } else {
      speed[i] = v.norm();
    }
  }

  double length = 0.0;
  for (std::size_t i = 0; i + 1 < k; ++i) length += 0.5 * (speed[i] + speed[i + 1]) * dt;
  return length;
}

bool check_monotonicity(const SpdMatrix& p1, const SpdMatrix& p2, const SpdMatrix& p3, double tol) {
  if (!loewner_leq(p1, p2, tol) || !loewner_leq(p2, p3, tol)) {
    throw Error(ErrorKind::PreconditionError, "inputs are not a Loewner chain P1 <= P2 <= P3");
  }
  return distance(MetricKind::AffineInvariant, p1, p2) <=
         distance(MetricKind::AffineInvariant, p1, p3) + 1e-10;
}

}  // namespace lgb
