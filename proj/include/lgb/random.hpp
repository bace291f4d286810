#pragma once

// Seeded random sources shared by the simulator and the property checks.
//
// The engine is std::mt19937_64. Parallel tasks derive their seed as
// base_seed ^ task_index, so results do not depend on scheduling.

#include <cstdint>
#include <random>

#include "lgb/spd.hpp"

namespace lgb {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }
  double normal() { return normal_(engine_); }

  Matrix normal_matrix(Index rows, Index cols);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t task_index) noexcept {
  return base ^ task_index;
}

/// M M^T with standard normal M, resampled until cond <= max_condition.
SpdMatrix random_spd(Rng& rng, Index dim, double max_condition = 1e6);

/// Standard normal square matrix resampled until cond <= max_condition.
Matrix random_invertible(Rng& rng, Index dim, double max_condition = 1e3);

/// Symmetric matrix with standard normal upper triangle.
SymMatrix random_symmetric(Rng& rng, Index dim);

}  // namespace lgb
