#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <ostream>
#include <optional>
#include <sstream>
#include <thread>

#include "lgb/cli.hpp"
#include "lgb/closed_form.hpp"
#include "lgb/ifs.hpp"
#include "lgb/means.hpp"
#include "lgb/random.hpp"
#include "lgb/sample_io.hpp"

namespace lgb::cli {

namespace {

using Clock = std::chrono::steady_clock;

std::string join(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += fields[i];
  }
  return line;
}

std::string matrix_field(const Matrix& m) {
  std::string s;
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (!s.empty()) s += ' ';
      s += format_double(m(r, c));
    }
  }
  return s;
}

int horizon_for(const ExperimentConfig& config, const SystemModel& model) {
  return config.n_horizon > 0 ? config.n_horizon : validate(model).observability_index;
}

// Closed-form columns for one gamma: a value, "diverged", or empty when the
// quantity does not apply to the model.
std::vector<std::string> closed_form_columns(const ExperimentConfig& config, const SystemModel& model,
                                             double gamma) {
  std::vector<std::string> cols(7);
  auto series = [](const ScalarSeriesResult& r) { return r.converged ? format_double(*r.value) : "diverged"; };
  const bool scalar = model.dim() == 1 && model.B().cols() == 1 && model.C().rows() == 1;
  if (scalar) {
    const double a = model.A()(0, 0), q = model.Q()(0, 0), icov = model.Info()(0, 0);
    try {
      cols[0] = series(expected_P_opt(a, q, icov, gamma));
      cols[1] = series(expected_P_pess(a, q, icov, gamma));
      cols[2] = series(expected_sqrtP_opt(a, q, icov, gamma));
      cols[3] = series(expected_sqrtP_pess(a, q, icov, gamma));
    } catch (const Error&) {
      std::fill(cols.begin(), cols.begin() + 4, std::string());
    }
    try {
      cols[4] = format_double(critical_prob_cov(a));
      cols[5] = format_double(critical_prob_abs(a));
    } catch (const Error&) {
    }
  }
  try {
    const int n = horizon_for(config, model);
    if (n > 0) cols[6] = series(riemannian_mean_bound(model, n, gamma));
  } catch (const Error&) {
  }
  return cols;
}

// Runs task(i) for i in [0, count) on `workers` threads; each task owns its
// output slot, so the result does not depend on scheduling.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < n_threads; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct SweepCell {
  std::vector<std::string> rows;
  std::size_t cells = 0;
  std::size_t diverged = 0;
  std::vector<std::string> warnings;
};

SweepCell sweep_gamma(const ExperimentConfig& config, const SystemModel& model, const SpdMatrix& p_inf,
                      std::size_t index) {
  const double gamma = config.gamma_grid[index];
  const SampleSet set = stationary_samples(model, p_inf, gamma, {config.burn_in, config.samples, config.stride},
                                           derive_seed(config.seed, index));
  const std::vector<std::string> closed = closed_form_columns(config, model, gamma);
  SweepCell cell;
  for (int level = config.ladder - 1; level >= 0; --level) {
    const std::size_t n = config.samples >> level;
    const bool diverged = set.draws.size() < n;
    for (MetricKind kind : config.metrics) {
      ++cell.cells;
      std::vector<std::string> row{format_double(gamma), std::to_string(n), std::string(to_string(kind))};
      std::optional<MeanResult> r;
      double ms = 0.0;
      if (!diverged) {
        const auto start = Clock::now();
        try {
          r = mean_for(kind, std::span<const SpdMatrix>(set.draws.data(), n), KarcherOptions{config.tol, 200, 1.0});
        } catch (const Error& e) {
          cell.warnings.push_back("sweep: gamma " + format_double(gamma) + " N " + std::to_string(n) + " " +
                                  std::string(to_string(kind)) + ": " + e.what());
        }
        ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
      }
      if (!r) {
        ++cell.diverged;
        row.insert(row.end(), {"", "", "", "1", ""});
      } else {
        row.push_back(format_double(r->mean.matrix().trace()));
        row.push_back(format_double(log_det(r->mean)));
        row.push_back(r->converged ? "1" : "0");
        row.push_back("0");
        row.push_back(config.timing ? format_double(ms) : "");
      }
      row.insert(row.end(), closed.begin(), closed.end());
      cell.rows.push_back(join(row));
    }
  }
  return cell;
}

// Property audit -------------------------------------------------------------

enum class Status { Pass, Fail, Skipped };

struct Property {
  std::string name;
  Status status = Status::Skipped;
  double measured = 0.0;
  std::string threshold;
  double margin = 0.0;
  std::string note;
};

Property upper_bound(std::string name, double measured, double limit, bool strict = false) {
  Property p;
  p.name = std::move(name);
  p.measured = measured;
  p.threshold = (strict ? "<" : "<=") + format_double(limit);
  p.margin = limit - measured;
  const bool ok = strict ? measured < limit : measured <= limit;
  p.status = ok ? Status::Pass : Status::Fail;
  return p;
}

Property skipped(std::string name, std::string note) {
  Property p;
  p.name = std::move(name);
  p.note = std::move(note);
  return p;
}

Index audit_dim(int t) { return 2 + t % 4; }

std::vector<Property> metric_properties(const ExperimentConfig& config) {
  double asym = 0.0, self = 0.0, triangle = -1e300, congr = 0.0, inv = 0.0;
  Rng rng(derive_seed(config.seed, 1));
  for (int t = 0; t < config.trials; ++t) {
    const Index n = audit_dim(t);
    const SpdMatrix x = random_spd(rng, n), y = random_spd(rng, n), z = random_spd(rng, n);
    for (MetricKind k : kAllMetrics) {
      const double xy = distance(k, x, y);
      asym = std::max(asym, std::abs(xy - distance(k, y, x)));
      self = std::max(self, distance(k, x, x));
      triangle = std::max(triangle, xy - distance(k, x, z) - distance(k, z, y));
    }
    const Matrix m = random_invertible(rng, n);
    const double d = distance(MetricKind::AffineInvariant, x, y);
    congr = std::max(congr, std::abs(distance(MetricKind::AffineInvariant, congruence(m, x), congruence(m, y)) - d) / d);
    inv = std::max(inv, std::abs(distance(MetricKind::AffineInvariant, spd_inv(x), spd_inv(y)) - d) / d);
  }
  std::vector<Property> out;
  out.push_back(upper_bound("metric_symmetry", asym, 0.0));
  out.push_back(upper_bound("metric_identity", self, 1e-10));
  out.push_back(upper_bound("metric_triangle", triangle, 1e-9));
  out.push_back(upper_bound("affine_congruence_invariance", congr, 1e-8));
  out.push_back(upper_bound("affine_inversion_invariance", inv, 1e-8));

  // Fixed witness: M = diag(2, 1), P = I, Q = 2I.
  Matrix m = Matrix::Identity(2, 2);
  m(0, 0) = 2.0;
  const SpdMatrix p = SpdMatrix::identity(2), q = SpdMatrix::diagonal(Vector::Constant(2, 2.0));
  Property w;
  w.name = "flat_cov_congruence_witness";
  w.measured = distance(MetricKind::FlatCov, congruence(m, p), congruence(m, q)) / distance(MetricKind::FlatCov, p, q);
  w.threshold = "!=1";
  w.margin = std::abs(w.measured - 1.0);
  w.status = w.margin > 1e-3 ? Status::Pass : Status::Fail;
  w.note = "ratio expected sqrt(17/2)";
  out.push_back(w);

  double mono = -1e300;
  Rng chain_rng(derive_seed(config.seed, 2));
  for (int t = 0; t < config.trials; ++t) {
    const Index n = audit_dim(t);
    const SpdMatrix p1 = random_spd(chain_rng, n);
    const Vector d1 = chain_rng.normal_matrix(n, 1), d2 = chain_rng.normal_matrix(n, 1);
    const SpdMatrix p2 = SpdMatrix::symmetrized(p1.matrix() + d1 * d1.transpose());
    const SpdMatrix p3 = SpdMatrix::symmetrized(p2.matrix() + d2 * d2.transpose());
    mono = std::max(mono, distance(MetricKind::AffineInvariant, p1, p2) - distance(MetricKind::AffineInvariant, p1, p3));
  }
  out.push_back(upper_bound("loewner_monotonicity", mono, 1e-10));
  return out;
}

// Largest eigenvalue of (lhs - rhs), relative to ||rhs||; <= 0 means lhs <= rhs.
double loewner_excess(const SpdMatrix& lhs, const SpdMatrix& rhs) {
  const SymMatrix diff = SymMatrix::symmetrized(lhs.matrix() - rhs.matrix());
  return sym_eig(diff).values(0) / spectral_norm(rhs.matrix());
}

std::vector<Property> model_properties(const ExperimentConfig& config, const SystemModel& model) {
  std::vector<Property> out;
  const StructuralReport report = validate(model);
  const char* names[] = {"fixed_point_residual", "g_below_h",        "g_order_preserving", "h_order_preserving",
                         "pessimist_above_fixed_point", "h_nonexpansive", "g_nonexpansive", "g_power_contraction"};
  if (!report.detectable) {
    for (const char* n : names) out.push_back(skipped(n, "(A, C) not detectable"));
    return out;
  }
  const SpdMatrix p_inf = fixed_point(model);
  const double residual = (map_g(model, p_inf).matrix() - p_inf.matrix()).norm() / p_inf.matrix().norm();
  out.push_back(upper_bound("fixed_point_residual", residual, 1e-12));

  double g_h = -1e300, g_order = -1e300, h_order = -1e300;
  Rng rng(derive_seed(config.seed, 3));
  const Index n = model.dim();
  for (int t = 0; t < config.trials; ++t) {
    const SpdMatrix p = random_spd(rng, n);
    const Vector d = rng.normal_matrix(n, 1);
    const SpdMatrix bigger = SpdMatrix::symmetrized(p.matrix() + d * d.transpose());
    g_h = std::max(g_h, loewner_excess(map_g(model, p), map_h(model, p)));
    g_order = std::max(g_order, loewner_excess(map_g(model, p), map_g(model, bigger)));
    h_order = std::max(h_order, loewner_excess(map_h(model, p), map_h(model, bigger)));
  }
  out.push_back(upper_bound("g_below_h", g_h, 1e-10));
  out.push_back(upper_bound("g_order_preserving", g_order, 1e-10));
  out.push_back(upper_bound("h_order_preserving", h_order, 1e-10));

  const int horizon = horizon_for(config, model);
  if (!report.a_invertible || horizon == 0) {
    const char* why = !report.a_invertible ? "A singular" : "(A, C) not observable";
    out.push_back(skipped("pessimist_above_fixed_point", why));
    out.push_back(skipped("h_nonexpansive", why));
    out.push_back(skipped("g_nonexpansive", why));
    out.push_back(skipped("g_power_contraction", why));
    for (double g : config.gamma_grid) out.push_back(skipped("average_contractivity@" + format_double(g), why));
    return out;
  }
  try {
    out.push_back(upper_bound("pessimist_above_fixed_point", loewner_excess(p_inf, pessimist_reset(model, horizon)),
                              1e-10));
  } catch (const Error& e) {
    out.push_back(skipped("pessimist_above_fixed_point", e.what()));
  }
  const auto seed = derive_seed(config.seed, 4);
  const MetricKind affine = MetricKind::AffineInvariant;
  out.push_back(upper_bound("h_nonexpansive", estimate_lipschitz(MapKind::H, model, affine, config.trials, seed), 1.0 + 1e-10));
  out.push_back(upper_bound("g_nonexpansive", estimate_lipschitz(MapKind::G, model, affine, config.trials, seed), 1.0 + 1e-10));
  out.push_back(upper_bound("g_power_contraction",
                            estimate_lipschitz(MapKind::GPower, model, affine, config.trials, seed, horizon), 1.0, true));
  const int block = std::min(horizon, 16);
  for (double g : config.gamma_grid) {
    out.push_back(upper_bound("average_contractivity@" + format_double(g),
                              average_contractivity(model, g, affine, config.trials, seed, block), 0.0, true));
  }
  return out;
}

const char* status_token(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Skipped: return "skipped";
  }
  return "?";
}

}  // namespace

int cmd_sweep(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  const SystemModel model = config.model();
  SpdMatrix p_inf = SpdMatrix::identity(model.dim());
  try {
    p_inf = fixed_point(model);
  } catch (const Error& e) {
    err << "sweep: " << e.what() << '\n';
    return kExitFailure;
  }
  std::vector<SweepCell> cells(config.gamma_grid.size());
  parallel_for(cells.size(), config.workers, [&](std::size_t i) { cells[i] = sweep_gamma(config, model, p_inf, i); });

  out << "# lgb-sweep v1\n";
  out << "gamma,N,metric,mean_trace,mean_logdet,converged,diverged_flag,runtime_ms,"
         "expected_P_opt,expected_P_pess,expected_sqrtP_opt,expected_sqrtP_pess,"
         "critical_prob_cov,critical_prob_abs,riemannian_mean_bound\n";
  std::size_t total = 0, diverged = 0;
  for (const auto& cell : cells) {
    for (const auto& row : cell.rows) out << row << '\n';
    for (const auto& w : cell.warnings) err << w << '\n';
    total += cell.cells;
    diverged += cell.diverged;
  }
  if (total > 0 && diverged == total) {
    err << "sweep: every cell diverged\n";
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_means(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  std::ifstream in(config.samples_file);
  if (!in) {
    err << "means: cannot open " << config.samples_file << '\n';
    return kExitUsage;
  }
  SampleSet set;
  try {
    set = read_sample_set(in);
  } catch (const Error& e) {
    err << "means: " << config.samples_file << ": " << e.what() << '\n';
    return kExitUsage;
  }
  if (set.draws.empty()) {
    err << "means: " << config.samples_file << " holds no draws\n";
    return kExitUsage;
  }
  const KarcherOptions karcher{config.tol, 200, 1.0};

  out << "# lgb-means v1\n";
  out << "metric,iterations,residual,converged,mean_trace,mean_logdet,mean\n";
  for (MetricKind kind : config.metrics) {
    const MeanResult r = mean_for(kind, set.draws, karcher);
    out << join({std::string(to_string(kind)), std::to_string(r.iterations), format_double(r.residual),
                 r.converged ? "1" : "0", format_double(r.mean.matrix().trace()), format_double(log_det(r.mean)),
                 matrix_field(r.mean.matrix())})
        << '\n';
  }

  const SpdMatrix h = harmonic_mean(set.draws).mean;
  const SpdMatrix s = sqrt_mean(set.draws).mean;
  const SpdMatrix e = euclidean_mean(set.draws).mean;
  const MeanResult k = karcher_mean(set.draws, karcher);
  std::vector<SpdMatrix> inverses;
  inverses.reserve(set.draws.size());
  for (const auto& p : set.draws) inverses.push_back(spd_inv(p));
  const SpdMatrix dual = spd_inv(karcher_mean(inverses, karcher).mean);
  const double duality = (dual.matrix() - k.mean.matrix()).norm() / k.mean.matrix().norm();
  out << "# harmonic_le_sqrt=" << (loewner_leq(h, s, 1e-9) ? 1 : 0) << '\n';
  out << "# sqrt_le_arithmetic=" << (loewner_leq(s, e, 1e-9) ? 1 : 0) << '\n';
  out << "# harmonic_le_arithmetic=" << (loewner_leq(h, e, 1e-9) ? 1 : 0) << '\n';
  out << "# karcher_duality_residual=" << format_double(duality) << '\n';
  return kExitOk;
}

int cmd_check(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  std::vector<Property> props = metric_properties(config);
  try {
    const auto more = model_properties(config, config.model());
    props.insert(props.end(), more.begin(), more.end());
  } catch (const Error& e) {
    err << "check: " << e.what() << '\n';
    props.push_back(skipped("model_properties", e.what()));
  }
  out << "# lgb-check v1\n";
  out << "property,status,measured,threshold,margin,note\n";
  bool failed = false;
  for (const auto& p : props) {
    failed = failed || p.status == Status::Fail;
    const bool has_value = p.status != Status::Skipped;
    out << join({p.name, status_token(p.status), has_value ? format_double(p.measured) : "", p.threshold,
                 has_value ? format_double(p.margin) : "", p.note})
        << '\n';
  }
  return failed ? kExitFailure : kExitOk;
}

int cmd_simulate(const ExperimentConfig& config, std::ostream& out, std::ostream&) {
  const SystemModel model = config.model();
  const double gamma = config.gamma_grid.front();
  const ArrivalSequence arrivals =
      gamma == 0.0 ? ArrivalSequence{0.0, std::vector<std::uint8_t>(config.steps, 0), config.seed}
                   : sample_arrivals(gamma, config.steps, config.seed);
  std::optional<SpdMatrix> p_inf;
  try {
    p_inf = fixed_point(model);
  } catch (const Error&) {
  }
  const Trajectory traj = run_ifs(model, arrivals, SpdMatrix::identity(model.dim()));

  out << "# lgb-simulate v1\n";
  out << "k,arrival_bit,trace,logdet,d_affine_to_Pinf\n";
  for (std::size_t k = 0; k < traj.covariances.size(); ++k) {
    const SpdMatrix& p = traj.covariances[k];
    out << join({std::to_string(k + 1), std::to_string(arrivals.bits[k]), format_double(p.matrix().trace()),
                 format_double(log_det(p)),
                 p_inf ? format_double(distance(MetricKind::AffineInvariant, p, *p_inf)) : ""})
        << '\n';
  }
  out << "# trailer reason=" << (traj.overflow ? "overflow" : "complete") << " steps=" << traj.covariances.size()
      << '\n';
  return kExitOk;
}

int cmd_sample(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  const SystemModel model = config.model();
  try {
    const SampleSet set = stationary_samples(model, config.gamma_grid.front(),
                                             {config.burn_in, config.samples, config.stride}, config.seed);
    write_sample_set(out, set);
    if (set.overflow) err << "sample: chain overflowed after " << set.draws.size() << " draws\n";
  } catch (const Error& e) {
    err << "sample: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

int run(Command command, const ExperimentConfig& config, std::ostream& stdout_stream, std::ostream& err) {
  std::ofstream file;
  if (!config.out.empty()) {
    file.open(config.out, std::ios::binary | std::ios::trunc);
    if (!file) {
      err << "cannot write " << config.out << '\n';
      return kExitUsage;
    }
  }
  std::ostream& out = config.out.empty() ? stdout_stream : file;
  try {
    switch (command) {
      case Command::Sweep: return cmd_sweep(config, out, err);
      case Command::Means: return cmd_means(config, out, err);
      case Command::Check: return cmd_check(config, out, err);
      case Command::Simulate: return cmd_simulate(config, out, err);
      case Command::Sample: return cmd_sample(config, out, err);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace lgb::cli
