#pragma once

// The covariance recursion under Bernoulli arrivals as an iterated function
// system: apply g with probability gamma_bar, h otherwise.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lgb/metrics.hpp"
#include "lgb/system.hpp"

namespace lgb {

/// Entries above this magnitude stop a trajectory with an overflow flag; so
/// does a step whose result is no longer numerically positive definite.
inline constexpr double kOverflowThreshold = 1e300;

struct ArrivalSequence {
  double gamma_bar = 1.0;
  std::vector<std::uint8_t> bits;
  std::uint64_t seed = 0;

  /// Steps since the last arrival, per index: 0 where bits[k] = 1. Before the
  /// first arrival the count runs from the start of the sequence (k + 1).
  [[nodiscard]] std::vector<int> tau() const;
  [[nodiscard]] double empirical_rate() const;
};

/// i.i.d. Bernoulli(gamma_bar) bits from std::mt19937_64(seed): bit k is
/// 1 iff the k-th uniform draw on [0, 1) is below gamma_bar.
ArrivalSequence sample_arrivals(double gamma_bar, std::size_t length, std::uint64_t seed);

struct Trajectory {
  SpdMatrix initial;
  /// covariances[k] = g(previous) if bits[k] = 1 else h(previous), where the
  /// previous value of covariances[0] is `initial`.
  std::vector<SpdMatrix> covariances;
  ArrivalSequence arrivals;
  /// Set when an entry exceeded kOverflowThreshold; covariances stops there.
  bool overflow = false;
};

bool overflowed(const Matrix& m);

/// One step of the system: g on arrival, h otherwise.
SpdMatrix ifs_step(const SystemModel& model, const SpdMatrix& p, bool arrival);

Trajectory run_ifs(const SystemModel& model, const ArrivalSequence& arrivals, const SpdMatrix& initial);

struct SamplingOptions {
  std::size_t burn_in = 1000;
  std::size_t count = 10000;
  std::size_t stride = 10;
};

struct SampleSet {
  std::vector<SpdMatrix> draws;
  std::vector<int> tau;  ///< steps since the last arrival, per draw
  std::size_t burn_in = 0;
  std::size_t stride = 1;
  std::uint64_t seed = 0;
  double gamma_bar = 1.0;
  std::uint64_t fingerprint = 0;
  /// Chain overflowed; `draws` holds what was recorded before that.
  bool overflow = false;
  std::size_t steps = 0;     ///< chain steps actually taken
  std::size_t arrivals = 0;  ///< arrivals among those steps
};

/// Runs the chain from P_inf, discards burn_in steps, then records every
/// stride-th covariance until `count` draws are collected.
SampleSet stationary_samples(const SystemModel& model, double gamma_bar, const SamplingOptions& options,
                             std::uint64_t seed);
/// Same, with a precomputed fixed point.
SampleSet stationary_samples(const SystemModel& model, const SpdMatrix& p_inf, double gamma_bar,
                             const SamplingOptions& options, std::uint64_t seed);

// Scalar companion systems --------------------------------------------------

enum class CompanionKind { Optimist, Pessimist };

struct ScalarTrajectory {
  std::vector<double> values;  ///< values[k] after bit k, as in Trajectory
  bool overflow = false;
};

/// On arrival reset to W (W_opt = g(P_inf) = P_inf, or W_pess = 1/Icov),
/// otherwise apply a^2 P + Q.
ScalarTrajectory run_companion(CompanionKind kind, double a, double q, double icov,
                               const ArrivalSequence& arrivals, double initial);

/// Stationary draws of a companion, with the same burn-in/stride scheme as
/// stationary_samples, started from its reset value.
std::vector<double> companion_stationary_samples(CompanionKind kind, double a, double q, double icov,
                                                 double gamma_bar, const SamplingOptions& options,
                                                 std::uint64_t seed);

// Contraction diagnostics ---------------------------------------------------

enum class MapKind { G, H, GPower };

/// Pairs used by the contraction estimates. Even-indexed pairs are two
/// independent points P_inf + s M M^T (M standard normal, s = 10^u with
/// u uniform on [-2, 2]); odd-indexed pairs are near-coincident
/// (P, P + 1e-3 ||P|| d d^T) with d a random unit vector.
std::vector<std::pair<SpdMatrix, SpdMatrix>> contraction_pairs(const SpdMatrix& p_inf, int n_pairs,
                                                               std::uint64_t seed);

/// max over sampled pairs of d(f(P1), f(P2)) / d(P1, P2). `power` is the n in
/// g^n for MapKind::GPower; 0 selects the observability index.
double estimate_lipschitz(MapKind map, const SystemModel& model, MetricKind metric, int n_pairs,
                          std::uint64_t seed, int power = 0);

/// sum over words w in {g, h}^block_length of P(w) * mean log(d(w(P1), w(P2)) / d(P1, P2)),
/// with P(w) = gamma^#g (1 - gamma)^#h. Negative values certify average contractivity.
double average_contractivity(const SystemModel& model, double gamma_bar, MetricKind metric, int n_pairs,
                             std::uint64_t seed, int block_length = 1);

}  // namespace lgb
