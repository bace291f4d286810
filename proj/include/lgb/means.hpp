#pragma once

// Four notions of the "average" of a set of covariance matrices, one per
// MetricKind: each minimizes the mean squared distance in its metric.
//
// Every function takes optional weights (non-negative, summing to 1);
// an empty span means uniform weights.

#include <cstdint>
#include <span>

#include "lgb/metrics.hpp"

namespace lgb {

struct MeanResult {
  SpdMatrix mean;
  MetricKind kind;
  int iterations = 0;
  /// First-order-condition norm at the returned mean (0 for closed forms).
  double residual = 0.0;
  bool converged = true;
};

/// E{P}.
MeanResult euclidean_mean(std::span<const SpdMatrix> samples, std::span<const double> weights = {});
/// E{P^{-1}}^{-1}.
MeanResult harmonic_mean(std::span<const SpdMatrix> samples, std::span<const double> weights = {});
/// E{sqrt(P)}^2.
MeanResult sqrt_mean(std::span<const SpdMatrix> samples, std::span<const double> weights = {});

struct KarcherOptions {
  double tol = 1e-10;
  int max_iter = 200;
  double step = 1.0;
};

/// Riemannian (Karcher) mean under the affine-invariant metric, by the
/// fixed-point iteration
///   X <- X^{1/2} exp(step * sum_i w_i log(X^{-1/2} P_i X^{-1/2})) X^{1/2}
/// from the Euclidean mean, until the tangent mean has Frobenius norm <= tol.
/// The step is halved within an iteration while the sum of squared distances
/// would increase.
/// On hitting max_iter the last iterate is returned with converged = false.
MeanResult karcher_mean(std::span<const SpdMatrix> samples, const KarcherOptions& options = {},
                        std::span<const double> weights = {});

/// Dispatches to the mean that minimizes the quadratic risk of `kind`.
MeanResult mean_for(MetricKind kind, std::span<const SpdMatrix> samples,
                    const KarcherOptions& options = {});

/// Mean of d^2(kind, candidate, P_i) over the samples.
double quadratic_risk(MetricKind kind, const SpdMatrix& candidate, std::span<const SpdMatrix> samples);

/// True iff the quadratic risk at `candidate` does not exceed the risk at any
/// of `trials` perturbations C^{1/2} exp(0.05 S) C^{1/2}, with S a random
/// symmetric direction of unit Frobenius norm.
bool variational_check(const SpdMatrix& candidate, std::span<const SpdMatrix> samples, MetricKind kind,
                       int trials, std::uint64_t seed = 1);

}  // namespace lgb
