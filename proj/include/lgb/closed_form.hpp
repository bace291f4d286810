#pragma once

// Closed-form analysis of the scalar companion systems and the series bound
// on E{d^2(P_inf, P)} under the affine-invariant distance.
//
// Scalar model conventions: a is the dynamics, q = b^2 the process noise and
// icov = c^2 the measurement information.

#include <optional>

#include "lgb/system.hpp"

namespace lgb {

struct ScalarSeriesResult {
  /// nullopt when the series diverges.
  std::optional<double> value;
  bool converged = false;
  /// Geometric ratio that governs convergence; converged iff ratio < 1.
  double ratio = 0.0;
  int terms_used = 0;
  double truncation_error_bound = 0.0;
};

/// P(tau = j) = (1 - gamma)^j gamma.
double tau_pmf(double gamma_bar, int j);

/// 1 - 1/a^2: E{e^2} is bounded iff gamma > this. Throws NoCriticalValue for |a| <= 1.
double critical_prob_cov(double a);
/// 1 - 1/|a|: E{|e|} is bounded iff gamma > this. Throws NoCriticalValue for |a| <= 1.
double critical_prob_abs(double a);

/// Positive root of icov a^2 P^2 + (icov q + 1 - a^2) P - q = 0, i.e. g(P) = P.
double scalar_fixed_point(double a, double q, double icov);

/// Reset value after an arrival: W_opt = ((a^2 P_inf + q)^{-1} + icov)^{-1}
/// (checked equal to P_inf) or W_pess = 1/icov.
double companion_reset(bool pessimist, double a, double q, double icov);

ScalarSeriesResult expected_P_opt(double a, double q, double icov, double gamma_bar);
ScalarSeriesResult expected_P_pess(double a, double q, double icov, double gamma_bar);
ScalarSeriesResult expected_sqrtP_opt(double a, double q, double icov, double gamma_bar, double tol = 1e-12);
ScalarSeriesResult expected_sqrtP_pess(double a, double q, double icov, double gamma_bar, double tol = 1e-12);

/// E{|e|} = sqrt(2/pi) sqrt(P) for a zero-mean Gaussian error of variance P.
double expected_abs_error(double p);

/// Constants of the bound, in coordinates whitened by P_inf.
struct BoundConstants {
  int horizon = 1;
  double a_norm = 0.0;     ///< ||M A M^{-1}||
  double q_norm = 0.0;     ///< ||M Q M^T||
  double w_norm = 0.0;     ///< ||M W_pess M^T||
  bool expanding = false;  ///< a_norm > 1
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
};

BoundConstants riemannian_bound_constants(const SystemModel& model, int n);

/// Upper bound on E{d^2(P_inf, P)}: gamma^n sum_i (1 - gamma^n)^i s(i), where
/// s(i) = i^2 c2 + i c3 + c4 when ||A'|| > 1 and s(i) = n log^2(||W'|| + n i ||Q'||)
/// otherwise. Summed term by term until the certified tail bound is <= tol.
ScalarSeriesResult riemannian_mean_bound(const SystemModel& model, int n, double gamma_bar,
                                         double tol = 1e-12);

}  // namespace lgb
