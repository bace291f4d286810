#include "lgb/ifs.hpp"

#include <cmath>
#include <string>

#include "lgb/closed_form.hpp"
#include "lgb/random.hpp"

namespace lgb {

namespace {

void require_gamma(double gamma_bar) {
  if (!(gamma_bar > 0.0 && gamma_bar <= 1.0)) {
    throw Error(ErrorKind::DomainError, "arrival probability must lie in (0, 1], got " +
                                            std::to_string(gamma_bar));
  }
}

// Bernoulli source shared by sample_arrivals and the samplers, so that a
// sampler with seed s sees exactly sample_arrivals(gamma, T, s).
class ArrivalSource {
 public:
  ArrivalSource(double gamma_bar, std::uint64_t seed) : gamma_(gamma_bar), rng_(seed) {}
  bool next() { return rng_.uniform() < gamma_; }

 private:
  double gamma_;
  Rng rng_;
};

// Advances p by one step; false if the step would overflow or leave the
// numerically positive definite matrices.
bool advance(const SystemModel& model, SpdMatrix& p, bool arrival) {
  const Matrix& a = model.A();
  const Matrix predicted = a * p.matrix() * a.transpose() + model.Q().matrix();
  if (!predicted.allFinite() || overflowed(predicted)) return false;
  try {
    p = ifs_step(model, p, arrival);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::DegenerateCovariance || e.kind() == ErrorKind::NotPositiveDefinite) return false;
    throw;
  }
  return !overflowed(p.matrix());
}

SpdMatrix apply_power(const SystemModel& model, SpdMatrix p, int power) {
  for (int k = 0; k < power; ++k) p = map_g(model, p);
  return p;
}

}  // namespace

std::vector<int> ArrivalSequence::tau() const {
  std::vector<int> out(bits.size());
  int count = 0;
  for (std::size_t k = 0; k < bits.size(); ++k) {
    count = bits[k] ? 0 : count + 1;
    out[k] = count;
  }
  return out;
}

double ArrivalSequence::empirical_rate() const {
  if (bits.empty()) return 0.0;
  std::size_t ones = 0;
  for (auto b : bits) ones += b;
  return static_cast<double>(ones) / static_cast<double>(bits.size());
}

ArrivalSequence sample_arrivals(double gamma_bar, std::size_t length, std::uint64_t seed) {
  require_gamma(gamma_bar);
  if (length == 0) throw Error(ErrorKind::DomainError, "arrival sequence must be non-empty");
  ArrivalSequence seq{gamma_bar, std::vector<std::uint8_t>(length), seed};
  ArrivalSource source(gamma_bar, seed);
  for (auto& b : seq.bits) b = source.next() ? 1 : 0;
  return seq;
}

bool overflowed(const Matrix& m) { return !(m.cwiseAbs().maxCoeff() <= kOverflowThreshold); }

SpdMatrix ifs_step(const SystemModel& model, const SpdMatrix& p, bool arrival) {
  return arrival ? map_g(model, p) : map_h(model, p);
}

Trajectory run_ifs(const SystemModel& model, const ArrivalSequence& arrivals, const SpdMatrix& initial) {
  require_same_dim(model.dim(), initial.dim(), "run_ifs");
  Trajectory traj{initial, {}, arrivals, false};
  traj.covariances.reserve(arrivals.bits.size());
  SpdMatrix p = initial;
  for (auto bit : arrivals.bits) {
    if (!advance(model, p, bit != 0)) {
      traj.overflow = true;
      break;
    }
    traj.covariances.push_back(p);
  }
  return traj;
}

SampleSet stationary_samples(const SystemModel& model, double gamma_bar, const SamplingOptions& options,
                             std::uint64_t seed) {
  return stationary_samples(model, fixed_point(model), gamma_bar, options, seed);
}

SampleSet stationary_samples(const SystemModel& model, const SpdMatrix& p_inf, double gamma_bar,
                             const SamplingOptions& options, std::uint64_t seed) {
  require_gamma(gamma_bar);
  require_same_dim(model.dim(), p_inf.dim(), "stationary_samples");
  if (options.stride < 1) throw Error(ErrorKind::DomainError, "stride must be at least 1");
  if (options.count < 1) throw Error(ErrorKind::DomainError, "sample count must be at least 1");

  SampleSet set;
  set.burn_in = options.burn_in;
  set.stride = options.stride;
  set.seed = seed;
  set.gamma_bar = gamma_bar;
  set.fingerprint = model.fingerprint();
  set.draws.reserve(options.count);
  set.tau.reserve(options.count);

  const std::size_t total = options.burn_in + options.count * options.stride;
  ArrivalSource source(gamma_bar, seed);
  SpdMatrix p = p_inf;
  int tau = 0;
  for (std::size_t step = 0; step < total; ++step) {
    const bool arrival = source.next();
    if (!advance(model, p, arrival)) {
      set.overflow = true;
      break;
    }
    ++set.steps;
    if (arrival) ++set.arrivals;
    tau = arrival ? 0 : tau + 1;
    if (step >= options.burn_in && (step - options.burn_in + 1) % options.stride == 0) {
      set.draws.push_back(p);
      set.tau.push_back(tau);
    }
  }
  return set;
}

ScalarTrajectory run_companion(CompanionKind kind, double a, double q, double icov,
                               const ArrivalSequence& arrivals, double initial) {
  const double reset = companion_reset(kind == CompanionKind::Pessimist, a, q, icov);
  const double a2 = a * a;
  ScalarTrajectory out;
  out.values.reserve(arrivals.bits.size());
  double p = initial;
  for (auto bit : arrivals.bits) {
    p = bit ? reset : a2 * p + q;
    if (!(p <= kOverflowThreshold)) {
      out.overflow = true;
      break;
    }
    out.values.push_back(p);
  }
  return out;
}

std::vector<double> companion_stationary_samples(CompanionKind kind, double a, double q, double icov,
                                                 double gamma_bar, const SamplingOptions& options,
                                                 std::uint64_t seed) {
  require_gamma(gamma_bar);
  if (options.stride < 1) throw Error(ErrorKind::DomainError, "stride must be at least 1");
  const double reset = companion_reset(kind == CompanionKind::Pessimist, a, q, icov);
  const double a2 = a * a;
  const std::size_t total = options.burn_in + options.count * options.stride;
  std::vector<double> draws;
  draws.reserve(options.count);
  ArrivalSource source(gamma_bar, seed);
  double p = reset;
  for (std::size_t step = 0; step < total; ++step) {
    p = source.next() ? reset : a2 * p + q;
    if (!(p <= kOverflowThreshold)) break;
    if (step >= options.burn_in && (step - options.burn_in + 1) % options.stride == 0) {
      draws.push_back(p);
    }
  }
  return draws;
}

std::vector<std::pair<SpdMatrix, SpdMatrix>> contraction_pairs(const SpdMatrix& p_inf, int n_pairs,
                                                               std::uint64_t seed) {
  const Index n = p_inf.dim();
  Rng rng(seed);
  auto offset = [&] {
    const Matrix m = rng.normal_matrix(n, n);
    const double scale = std::pow(10.0, 4.0 * rng.uniform() - 2.0);
    return SpdMatrix::symmetrized(p_inf.matrix() + scale * m * m.transpose());
  };
  std::vector<std::pair<SpdMatrix, SpdMatrix>> pairs;
  pairs.reserve(static_cast<std::size_t>(n_pairs));
  for (int i = 0; i < n_pairs; ++i) {
    SpdMatrix first = offset();
    if (i % 2 == 0) {
      pairs.emplace_back(std::move(first), offset());
    } else {
      Vector d(n);
      for (Index j = 0; j < n; ++j) d(j) = rng.normal();
      d /= d.norm();
      const double eps = 1e-3 * spectral_norm(first.matrix());
      SpdMatrix second = SpdMatrix::symmetrized(first.matrix() + eps * d * d.transpose());
      pairs.emplace_back(std::move(first), std::move(second));
    }
  }
  return pairs;
}

double estimate_lipschitz(MapKind map, const SystemModel& model, MetricKind metric, int n_pairs,
                          std::uint64_t seed, int power) {
  if (n_pairs < 1) throw Error(ErrorKind::DomainError, "need at least one pair");
  if (map == MapKind::GPower && power == 0) {
    power = validate(model).observability_index;
    if (power == 0) throw Error(ErrorKind::NotObservableAtHorizon, "(A, C) is not observable");
  }
  auto apply = [&](const SpdMatrix& p) {
    switch (map) {
      case MapKind::G: return map_g(model, p);
      case MapKind::H: return map_h(model, p);
      case MapKind::GPower: return apply_power(model, p, power);
    }
    throw Error(ErrorKind::DomainError, "unknown map");
  };
  double worst = 0.0;
  for (const auto& [p1, p2] : contraction_pairs(fixed_point(model), n_pairs, seed)) {
    const double before = distance(metric, p1, p2);
    if (before == 0.0) continue;
    worst = std::max(worst, distance(metric, apply(p1), apply(p2)) / before);
  }
  return worst;
}

double average_contractivity(const SystemModel& model, double gamma_bar, MetricKind metric, int n_pairs,
                             std::uint64_t seed, int block_length) {
  require_gamma(gamma_bar);
  if (n_pairs < 1) throw Error(ErrorKind::DomainError, "need at least one pair");
  if (block_length < 1 || block_length > 16) {
    throw Error(ErrorKind::DomainError, "block length must lie in [1, 16]");
  }
  const auto pairs = contraction_pairs(fixed_point(model), n_pairs, seed);
  double total = 0.0;
  for (unsigned word = 0; word < (1u << block_length); ++word) {
    double prob = 1.0;
    for (int j = 0; j < block_length; ++j) prob *= (word >> j) & 1u ? gamma_bar : 1.0 - gamma_bar;
    if (prob == 0.0) continue;
    double sum = 0.0;
    int used = 0;
    for (const auto& [p1, p2] : pairs) {
      const double before = distance(metric, p1, p2);
      if (before == 0.0) continue;
      SpdMatrix x = p1;
      SpdMatrix y = p2;
      for (int j = 0; j < block_length; ++j) {
        const bool arrival = (word >> j) & 1u;
        x = ifs_step(model, x, arrival);
        y = ifs_step(model, y, arrival);
      }
      sum += std::log(distance(metric, x, y) / before);
      ++used;
    }
    if (used > 0) total += prob * sum / used;
  }
  return total;
}

}  // namespace lgb
