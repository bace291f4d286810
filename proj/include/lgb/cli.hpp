#pragma once

// Batch experiments behind the lgbtool executable. Every command writes a
// versioned CSV (first line "# lgb-<command> v1") and returns a process exit
// code: 0 success, 1 property failure or all cells failed, 2 usage error.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lgb/metrics.hpp"
#include "lgb/system.hpp"

namespace lgb::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Rejected configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { Sweep, Means, Check, Simulate, Sample };

struct ExperimentConfig {
  Matrix a, b, c;
  std::vector<double> gamma_grid{0.1, 0.5, 0.9};
  std::uint64_t seed = 12345;
  std::size_t burn_in = 1000;
  std::size_t samples = 10000;
  std::size_t stride = 10;
  /// Number of sample sizes in the sweep: samples / 2^(ladder-1), ..., samples / 2, samples.
  int ladder = 4;
  std::vector<MetricKind> metrics{std::begin(kAllMetrics), std::end(kAllMetrics)};
  std::string out;  ///< empty for stdout
  double tol = 1e-10;
  int n_horizon = 0;  ///< 0 selects the observability index
  int workers = 1;
  std::size_t steps = 200;
  bool timing = false;
  std::string samples_file;
  /// Property-audit sample counts (triples, chains, pairs).
  int trials = 1000;

  [[nodiscard]] SystemModel model() const { return SystemModel(a, b, c); }
};

/// 1.2 R(0.5) with B = I and C = (1 0): unstable, invertible, observable at horizon 2.
ExperimentConfig default_config();

/// Command-line overrides; unset fields keep the file (or default) value.
struct ConfigOverrides {
  std::optional<std::string> config_path;
  std::optional<std::vector<double>> gamma;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples, burn_in, stride, steps;
  std::optional<int> ladder, n_horizon, workers, trials;
  std::optional<std::vector<std::string>> metrics;
  std::optional<std::string> out, samples_file;
  std::optional<double> tol;
  bool timing = false;
};

/// Applies a JSON config document on top of `base`. `source` names the
/// document in diagnostics. Throws ConfigError with line or field details.
ExperimentConfig apply_config_json(ExperimentConfig base, const std::string& text, const std::string& source);

/// Defaults, then the config file, then flags; validated for `command`.
ExperimentConfig parse_config(const ConfigOverrides& overrides, Command command);

/// Range checks; gamma = 0 is only meaningful for simulate.
void validate_config(const ExperimentConfig& config, Command command);

/// %.17g, or "inf"/"nan" for non-finite values.
std::string format_double(double x);

int cmd_sweep(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
int cmd_means(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
int cmd_check(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
int cmd_simulate(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
/// Writes a JSON-lines sample set at the first gamma of the grid.
int cmd_sample(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

/// Dispatches, writing to config.out (opened before any work) or `stdout_stream`.
int run(Command command, const ExperimentConfig& config, std::ostream& stdout_stream, std::ostream& err);

}  // namespace lgb::cli
