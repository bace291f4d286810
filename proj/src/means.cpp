#include "lgb/means.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "lgb/random.hpp"

namespace lgb {

namespace {

std::vector<double> resolve_weights(std::span<const SpdMatrix> samples, std::span<const double> weights) {
  if (samples.empty()) throw Error(ErrorKind::EmptyInput, "mean of an empty sample set");
  const Index n = samples.front().dim();
  for (const SpdMatrix& p : samples) require_same_dim(n, p.dim(), "mean");
  if (weights.empty()) return std::vector<double>(samples.size(), 1.0 / static_cast<double>(samples.size()));
  if (weights.size() != samples.size()) {
    throw Error(ErrorKind::DomainError, "one weight per sample is required");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw Error(ErrorKind::DomainError, "weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorKind::DomainError, "weights must sum to 1");
  return {weights.begin(), weights.end()};
}

template <class F>
Matrix weighted_sum(std::span<const SpdMatrix> samples, const std::vector<double>& w, F&& f) {
  const Index n = samples.front().dim();
  Matrix acc = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < samples.size(); ++i) acc += w[i] * f(samples[i]);
  return acc;
}

}  // namespace

MeanResult euclidean_mean(std::span<const SpdMatrix> samples, std::span<const double> weights) {
  const auto w = resolve_weights(samples, weights);
  const Matrix m = weighted_sum(samples, w, [](const SpdMatrix& p) { return p.matrix(); });
  return {SpdMatrix::symmetrized(m), MetricKind::FlatCov};
}

MeanResult harmonic_mean(std::span<const SpdMatrix> samples, std::span<const double> weights) {
  const auto w = resolve_weights(samples, weights);
  const Matrix m = weighted_sum(samples, w, [](const SpdMatrix& p) { return spd_inv(p).matrix(); });
  return {spd_inv(SpdMatrix::symmetrized(m)), MetricKind::FlatInfo};
}

MeanResult sqrt_mean(std::span<const SpdMatrix> samples, std::span<const double> weights) {
  const auto w = resolve_weights(samples, weights);
  const Matrix m = weighted_sum(samples, w, [](const SpdMatrix& p) { return spd_sqrt(p).matrix(); });
  return {SpdMatrix::symmetrized(m * m), MetricKind::FlatSqrt};
}

MeanResult karcher_mean(std::span<const SpdMatrix> samples, const KarcherOptions& options,
                        std::span<const double> weights) {
  const auto w = resolve_weights(samples, weights);
  SpdMatrix x = euclidean_mean(samples, weights).mean;

  // Tangent mean at X (minus half the gradient of the cost) and the cost
  // sum_i w_i ||log(X^{-1/2} P_i X^{-1/2})||_F^2.
  struct Local {
    Matrix tangent;
    double cost;
  };
  auto local = [&](const SpdMatrix& at) {
    const Matrix inv_root = spd_inv_sqrt(at).matrix();
    Local out{Matrix::Zero(at.dim(), at.dim()), 0.0};
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const Matrix l = spd_log(SpdMatrix::symmetrized(inv_root * samples[i].matrix() * inv_root)).matrix();
      out.tangent += w[i] * l;
      out.cost += w[i] * l.squaredNorm();
    }
    return out;
  };
  auto move = [](const SpdMatrix& from, const Matrix& direction, double step) {
    return congruence(spd_sqrt(from).matrix(), sym_exp(SymMatrix::symmetrized(step * direction)));
  };

  Local here = local(x);
  double step = options.step;
  for (int it = 0;; ++it) {
    const double residual = here.tangent.norm();
    if (residual <= options.tol) return {x, MetricKind::AffineInvariant, it, residual, true};
    if (it == options.max_iter) return {x, MetricKind::AffineInvariant, it, residual, false};
    // Halve the step until the cost does not rise; far from the mean a full
    // step can overshoot and the plain iteration oscillates.
    step = std::min(options.step, 2.0 * step);
    SpdMatrix next = move(x, here.tangent, step);
    Local there = local(next);
    for (int halvings = 0; halvings < 40 && there.cost > here.cost * (1.0 + 1e-12); ++halvings) {
      step *= 0.5;
      next = move(x, here.tangent, step);
      there = local(next);
    }
    x = std::move(next);
    here = std::move(there);
  }
}

MeanResult mean_for(MetricKind kind, std::span<const SpdMatrix> samples, const KarcherOptions& options) {
  switch (kind) {
    case MetricKind::FlatCov: return euclidean_mean(samples);
    case MetricKind::FlatInfo: return harmonic_mean(samples);
    case MetricKind::FlatSqrt: return sqrt_mean(samples);
    case MetricKind::AffineInvariant: return karcher_mean(samples, options);
  }
  throw Error(ErrorKind::DomainError, "unknown metric");
}

double quadratic_risk(MetricKind kind, const SpdMatrix& candidate, std::span<const SpdMatrix> samples) {
  if (samples.empty()) throw Error(ErrorKind::EmptyInput, "risk of an empty sample set");
  double acc = 0.0;
  for (const SpdMatrix& p : samples) {
    const double d = distance(kind, candidate, p);
    acc += d * d;
  }
  return acc / static_cast<double>(samples.size());
}

bool variational_check(const SpdMatrix& candidate, std::span<const SpdMatrix> samples, MetricKind kind,
                       int trials, std::uint64_t seed) {
  constexpr double kEpsilon = 0.05;
  const double base = quadratic_risk(kind, candidate, samples);
  const SpdMatrix root = spd_sqrt(candidate);
  Rng rng(seed);
  for (int i = 0; i < trials; ++i) {
    const SymMatrix s = random_symmetric(rng, candidate.dim());
    const Matrix direction = s.matrix() / s.matrix().norm();
    const SpdMatrix perturbed =
        congruence(root.matrix(), sym_exp(SymMatrix::symmetrized(kEpsilon * direction)));
    if (quadratic_risk(kind, perturbed, samples) < base * (1.0 - 1e-12)) return false;
  }
  return true;
}

}  // namespace lgb
