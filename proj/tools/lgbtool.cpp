#include <iostream>

#include <CLI11.hpp>

#include "lgb/cli.hpp"

using lgb::cli::Command;

namespace {

void add_common(CLI::App& sub, lgb::cli::ConfigOverrides& o) {
  sub.add_option("--config", o.config_path, "JSON config file; flags override its values");
  sub.add_option("--gamma", o.gamma, "arrival probability grid (default 0.1 0.5 0.9)")->expected(1, -1);
  sub.add_option("--seed", o.seed, "base seed (default 12345)");
  sub.add_option("--samples", o.samples, "stationary draws per gamma (default 10000)");
  sub.add_option("--burn-in", o.burn_in, "discarded steps before sampling (default 1000)");
  sub.add_option("--stride", o.stride, "steps between recorded draws (default 10)");
  sub.add_option("--metric", o.metrics, "flat-cov, flat-info, flat-sqrt, affine or all (default all)")
      ->expected(1, -1);
  sub.add_option("--out", o.out, "output file (default stdout)");
  sub.add_option("--tol", o.tol, "Karcher mean tolerance (default 1e-10)");
  sub.add_option("--n-horizon", o.n_horizon, "horizon n for g^n; 0 uses the observability index");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covariance statistics of a Kalman filter with Bernoulli observation arrivals"};
  app.require_subcommand(1);
  lgb::cli::ConfigOverrides o;

  auto* sweep = app.add_subcommand("sweep", "means of stationary samples over a gamma grid and a doubling N ladder");
  add_common(*sweep, o);
  sweep->add_option("--ladder", o.ladder, "number of sample sizes, halving from --samples (default 4)");
  sweep->add_option("--workers", o.workers, "concurrent gamma cells (default 1)");
  sweep->add_flag("--timing", o.timing, "fill the runtime_ms column (output is then not reproducible)");

  auto* means = app.add_subcommand("means", "all four means of a JSON-lines sample file");
  add_common(*means, o);
  means->add_option("--samples-file", o.samples_file, "sample file written by 'sample'")->required();

  auto* check = app.add_subcommand("check", "property audit of the metrics and the model maps");
  add_common(*check, o);
  check->add_option("--trials", o.trials, "random cases per property (default 1000)");

  auto* simulate = app.add_subcommand("simulate", "one trajectory from P0 = I at the first gamma");
  add_common(*simulate, o);
  simulate->add_option("--steps", o.steps, "trajectory length (default 200)");

  auto* sample = app.add_subcommand("sample", "write stationary draws at the first gamma as JSON lines");
  add_common(*sample, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lgb::cli::kExitUsage;
  }

  Command command = Command::Sweep;
  if (*means) command = Command::Means;
  if (*check) command = Command::Check;
  if (*simulate) command = Command::Simulate;
  if (*sample) command = Command::Sample;

  lgb::cli::ExperimentConfig config;
  try {
    config = lgb::cli::parse_config(o, command);
  } catch (const lgb::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return lgb::cli::kExitUsage;
  }
  return lgb::cli::run(command, config, std::cout, std::cerr);
}
