#pragma once

// Distances between zero-mean Gaussians, identified with their covariance.

#include <span>
#include <string_view>

#include "lgb/spd.hpp"

namespace lgb {

enum class MetricKind {
  FlatCov,          ///< ||P1 - P2||_F
  FlatInfo,         ///< ||P1^{-1} - P2^{-1}||_F
  FlatSqrt,         ///< ||sqrt(P1) - sqrt(P2)||_F
  AffineInvariant,  ///< sqrt(sum_i log^2 lambda_i(P1 P2^{-1}))
};

inline constexpr MetricKind kAllMetrics[] = {MetricKind::FlatCov, MetricKind::FlatInfo,
                                             MetricKind::FlatSqrt, MetricKind::AffineInvariant};

/// flat-cov | flat-info | flat-sqrt | affine
std::string_view to_string(MetricKind kind) noexcept;
/// Throws DomainError on an unknown token.
MetricKind parse_metric_kind(std::string_view token);

/// Exactly symmetric in its arguments, and exactly zero for identical inputs.
double distance(MetricKind kind, const SpdMatrix& p1, const SpdMatrix& p2);

/// Fisher information metric on zero-mean Gaussians: 1/2 Tr(P^{-1} X P^{-1} Y).
double fisher_metric(const SpdMatrix& p, const SymMatrix& x, const SymMatrix& y);

/// Affine-invariant geodesic P1^{1/2} (P1^{-1/2} P2 P1^{-1/2})^t P1^{1/2}, t in [0, 1].
SpdMatrix geodesic(const SpdMatrix& p1, const SpdMatrix& p2, double t);

/// Length of a curve sampled at k >= 2 equally spaced parameters on [0, 1],
/// by the trapezoidal rule with finite-difference velocities.
///
/// For AffineInvariant the speed is sqrt(tensor_scale * fisher_metric(P, V, V)).
/// With tensor_scale = 2 a geodesic's length equals distance(AffineInvariant);
/// the bare Fisher tensor (tensor_scale = 1) gives that distance / sqrt(2).
/// The flat kinds use the Frobenius speed of P, P^{-1} or sqrt(P) and ignore
/// tensor_scale.
double curve_length(MetricKind kind, std::span<const SpdMatrix> samples, double tensor_scale = 2.0);

/// Given P1 <= P2 <= P3 (Loewner, tolerance `tol`), reports whether
/// d(P1, P2) <= d(P1, P3) + 1e-10 in the affine-invariant distance.
/// Throws PreconditionError if the chain does not hold.
bool check_monotonicity(const SpdMatrix& p1, const SpdMatrix& p2, const SpdMatrix& p3,
                        double tol = 1e-10);

}  // namespace lgb
