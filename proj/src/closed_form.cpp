#include "lgb/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace lgb {

namespace {

void require_gamma(double gamma_bar) {
  if (!(gamma_bar > 0.0 && gamma_bar <= 1.0)) {
    throw Error(ErrorKind::DomainError, "arrival probability must lie in (0, 1]");
  }
}

void require_unstable(double a) {
  if (!(std::abs(a) > 1.0)) {
    throw Error(ErrorKind::DomainError, "closed-form series require |a| > 1");
  }
}

// P_opt(tau) = a^{2 tau} W + sum_{i < tau} a^{2i} Q = a^{2 tau} (W + Q/(a^2-1)) - Q/(a^2-1).
// Weighting by P(tau = j) = gamma (1-gamma)^j gives a geometric series in a^2 (1-gamma).
ScalarSeriesResult expected_cov(double reset, double a, double q, double gamma_bar) {
  require_unstable(a);
  require_gamma(gamma_bar);
  const double a2 = a * a;
  const double shift = q / (a2 - 1.0);
  ScalarSeriesResult r;
  r.ratio = a2 * (1.0 - gamma_bar);
  r.converged = r.ratio < 1.0;
  if (r.converged) r.value = gamma_bar * (reset + shift) / (1.0 - r.ratio) - shift;
  return r;
}

// sqrt(P_opt(tau)) = |a|^tau sqrt((W + Q/(a^2-1)) - Q/(a^{2 tau} (a^2-1))); each term is at most
// gamma r^j sqrt(W + Q/(a^2-1)), which gives the geometric tail bound.
ScalarSeriesResult expected_sqrt(double reset, double a, double q, double gamma_bar, double tol) {
  require_unstable(a);
  require_gamma(gamma_bar);
  if (!(tol > 0.0)) throw Error(ErrorKind::DomainError, "tolerance must be positive");
  const double a2 = a * a;
  const double shift = q / (a2 - 1.0);
  const double level = reset + shift;
  ScalarSeriesResult r;
  r.ratio = std::abs(a) * (1.0 - gamma_bar);
  r.converged = r.ratio < 1.0;
  if (!r.converged) return r;

  double sum = 0.0;
  double ratio_pow = 1.0;
  double a2_pow = 1.0;
  int j = 0;
  double tail = 0.0;
  for (;;) {
    sum += gamma_bar * ratio_pow * std::sqrt(std::max(0.0, level - shift / a2_pow));
    ++j;
    ratio_pow *= r.ratio;
    a2_pow *= a2;
    tail = gamma_bar * std::sqrt(level) * ratio_pow / (1.0 - r.ratio);
    if (tail <= tol) break;
  }
  r.value = sum;
  r.terms_used = j;
  r.truncation_error_bound = tail;
  return r;
}

}  // namespace

double tau_pmf(double gamma_bar, int j) {
  require_gamma(gamma_bar);
  if (j < 0) throw Error(ErrorKind::DomainError, "tau must be non-negative");
  return std::pow(1.0 - gamma_bar, j) * gamma_bar;
}

double critical_prob_cov(double a) {
  if (!(std::abs(a) > 1.0)) throw Error(ErrorKind::NoCriticalValue, "|a| <= 1 has no critical probability");
  return 1.0 - 1.0 / (a * a);
}

double critical_prob_abs(double a) {
  if (!(std::abs(a) > 1.0)) throw Error(ErrorKind::NoCriticalValue, "|a| <= 1 has no critical probability");
  return 1.0 - 1.0 / std::abs(a);
}

double scalar_fixed_point(double a, double q, double icov) {
  if (q < 0.0 || icov < 0.0) throw Error(ErrorKind::DomainError, "q and icov must be non-negative");
  const double a2 = a * a;
  const double quad = icov * a2;
  const double lin = icov * q + 1.0 - a2;
  double p = 0.0;
  if (quad == 0.0) {
    if (lin > 0.0) p = q / lin;
  } else {
    const double root = std::sqrt(lin * lin + 4.0 * quad * q);
    p = lin >= 0.0 ? 2.0 * q / (lin + root) : (root - lin) / (2.0 * quad);
  }
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw Error(ErrorKind::StructuralError, "g has no positive fixed point");
  }
  return p;
}

double companion_reset(bool pessimist, double a, double q, double icov) {
  if (pessimist) {
    if (!(icov > 0.0)) throw Error(ErrorKind::DomainError, "pessimist reset needs icov > 0");
    return 1.0 / icov;
  }
  const double p_inf = scalar_fixed_point(a, q, icov);
  const double w = 1.0 / (1.0 / (a * a * p_inf + q) + icov);
  if (std::abs(w - p_inf) > 1e-12 * p_inf) {
    throw Error(ErrorKind::NoConvergence, "optimist reset g(P_inf) differs from P_inf");
  }
  return w;
}

ScalarSeriesResult expected_P_opt(double a, double q, double icov, double gamma_bar) {
  require_unstable(a);
  return expected_cov(companion_reset(false, a, q, icov), a, q, gamma_bar);
}

ScalarSeriesResult expected_P_pess(double a, double q, double icov, double gamma_bar) {
  require_unstable(a);
  return expected_cov(companion_reset(true, a, q, icov), a, q, gamma_bar);
}

ScalarSeriesResult expected_sqrtP_opt(double a, double q, double icov, double gamma_bar, double tol) {
  require_unstable(a);
  return expected_sqrt(companion_reset(false, a, q, icov), a, q, gamma_bar, tol);
}

ScalarSeriesResult expected_sqrtP_pess(double a, double q, double icov, double gamma_bar, double tol) {
  require_unstable(a);
  return expected_sqrt(companion_reset(true, a, q, icov), a, q, gamma_bar, tol);
}

double expected_abs_error(double p) {
  if (!(p >= 0.0)) throw Error(ErrorKind::DomainError, "variance must be non-negative");
  return std::sqrt(2.0 / std::numbers::pi) * std::sqrt(p);
}

BoundConstants riemannian_bound_constants(const SystemModel& model, int n) {
  if (n < 1) throw Error(ErrorKind::DomainError, "horizon must be at least 1");
  const SpdMatrix p_inf = fixed_point(model);
  const SpdMatrix w_pess = pessimist_reset(model, n);
  // Whitened coordinates: P' = M P M^T with M P_inf M^T = I. The dynamics
  // become A' = M A M^{-1}, so P'_pess(tau) = A'^{n tau} W' A'^{T n tau} + sum A'^i Q' A'^{T i}.
  const Matrix m = whitener(p_inf);
  const Matrix m_inv = spd_sqrt(p_inf).matrix();
  BoundConstants c;
  c.horizon = n;
  c.a_norm = spectral_norm(m * model.A() * m_inv);
  c.q_norm = spectral_norm(m * model.Q().matrix() * m.transpose());
  c.w_norm = spectral_norm(m * w_pess.matrix() * m.transpose());
  c.expanding = c.a_norm > 1.0;
  const double nn = n;
  if (c.expanding) {
    // ||P'_pess|| <= ||A'||^{2 n tau} c1, and P'_pess >= I, so
    // d^2(I, P'_pess) <= n log^2 ||P'_pess|| <= n (2 n tau l + log c1)^2.
    const double l = std::log(c.a_norm);
    c.c1 = c.w_norm + c.q_norm / (c.a_norm * c.a_norm - 1.0);
    const double lc = std::max(0.0, std::log(c.c1));
    c.c2 = 4.0 * nn * nn * nn * l * l;
    c.c3 = 4.0 * nn * nn * l * lc;
    c.c4 = nn * lc * lc;
  } else {
    // ||P'_pess|| <= ||W'|| + n tau ||Q'||. The summand n log^2(c1 + n tau ||Q'||) is majorized by
    // n (log c1 + n tau ||Q'|| / c1)^2, whose coefficients are stored for the tail bound.
    c.c1 = std::max(1.0, c.w_norm);
    const double lc = std::log(c.c1);
    const double slope = nn * c.q_norm / c.c1;
    c.c2 = nn * slope * slope;
    c.c3 = 2.0 * nn * lc * slope;
    c.c4 = nn * lc * lc;
  }
  return c;
}

ScalarSeriesResult riemannian_mean_bound(const SystemModel& model, int n, double gamma_bar, double tol) {
  require_gamma(gamma_bar);
  if (!(tol > 0.0)) throw Error(ErrorKind::DomainError, "tolerance must be positive");
  const BoundConstants c = riemannian_bound_constants(model, n);
  const double nn = n;
  const double head = std::pow(gamma_bar, nn);
  const double x = 1.0 - head;

  auto majorant = [&](double i) { return i * i * c.c2 + i * c.c3 + c.c4; };
  auto summand = [&](double i) {
    if (c.expanding) return majorant(i);
    const double lg = std::log(std::max(1.0, c.w_norm + nn * i * c.q_norm));
    return nn * lg * lg;
  };

  constexpr long kMaxTerms = 100'000'000;
  ScalarSeriesResult r;
  r.ratio = x;
  r.converged = true;
  double sum = 0.0;
  double x_pow = 1.0;  // x^i
  long i = 0;
  double tail = 0.0;
  for (;;) {
    sum += head * x_pow * summand(static_cast<double>(i));
    ++i;
    x_pow *= x;
    if (x_pow == 0.0) {
      tail = 0.0;
      break;
    }
    // For a polynomial of degree <= 2 with non-negative coefficients,
    // p(k+1)/p(k) <= ((k+1)/k)^2, so the term ratio is at most rho_k below.
    const double k = static_cast<double>(i);
    const double rho = x * ((k + 1.0) / k) * ((k + 1.0) / k);
    if (rho < 1.0) {
      tail = head * x_pow * majorant(k) / (1.0 - rho);
      if (tail <= tol) break;
    }
    if (i >= kMaxTerms) {
      throw Error(ErrorKind::NoConvergence, "bound series needs more than 1e8 terms");
    }
  }
  r.value = sum;
  r.terms_used = static_cast<int>(i);
  r.truncation_error_bound = tail;
  return r;
}

}  // namespace lgb
