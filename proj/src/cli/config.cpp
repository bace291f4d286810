#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lgb/cli.hpp"

namespace lgb::cli {

namespace {

using json = nlohmann::json;

// Line of the first occurrence of "key" in the document, for diagnostics.
std::size_t line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find('"' + key + '"');
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

class FieldReader {
 public:
  FieldReader(const std::string& text, const std::string& source) : text_(text), source_(source) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    std::string where = source_;
    const std::string top = field.substr(0, field.find_first_of(".["));
    if (const auto line = line_of_key(text_, top); line > 0) where += ":" + std::to_string(line);
    throw ConfigError(where + ": field '" + field + "': " + what);
  }

  double number(const json& v, const std::string& field) const {
    if (!v.is_number()) fail(field, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(field, "must be finite");
    return x;
  }

  std::uint64_t unsigned_int(const json& v, const std::string& field) const {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      fail(field, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  int small_int(const json& v, const std::string& field) const {
    const std::uint64_t x = unsigned_int(v, field);
    if (x > 1'000'000) fail(field, "too large");
    return static_cast<int>(x);
  }

  std::string string(const json& v, const std::string& field) const {
    if (!v.is_string()) fail(field, "expected a string");
    return v.get<std::string>();
  }

  Matrix matrix(const json& v, const std::string& field) const {
    if (v.is_number()) return Matrix::Constant(1, 1, number(v, field));
    if (!v.is_array() || v.empty()) fail(field, "expected a number or a non-empty array of rows");
    const std::size_t rows = v.size();
    std::size_t cols = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      const std::string row_field = field + "[" + std::to_string(r) + "]";
      if (!v[r].is_array() || v[r].empty()) fail(row_field, "expected a non-empty array");
      if (r == 0) cols = v[r].size();
      if (v[r].size() != cols) fail(row_field, "rows must have equal length");
    }
    Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        m(static_cast<Index>(r), static_cast<Index>(c)) =
            number(v[r][c], field + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
      }
    }
    return m;
  }

 private:
  const std::string& text_;
  const std::string& source_;
};

std::vector<MetricKind> parse_metrics(const std::vector<std::string>& tokens) {
  std::vector<MetricKind> out;
  for (const auto& t : tokens) {
    if (t == "all") {
      out.assign(std::begin(kAllMetrics), std::end(kAllMetrics));
      continue;
    }
    try {
      const MetricKind k = parse_metric_kind(t);
      if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
    } catch (const Error&) {
      throw ConfigError("unknown metric '" + t + "' (expected flat-cov, flat-info, flat-sqrt, affine or all)");
    }
  }
  return out;
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig c;
  const double co = std::cos(0.5), si = std::sin(0.5);
  c.a.resize(2, 2);
  c.a << co, -si, si, co;
  c.a *= 1.2;
  c.b = Matrix::Identity(2, 2);
  c.c.resize(1, 2);
  c.c << 1, 0;
  return c;
}

ExperimentConfig apply_config_json(ExperimentConfig config, const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
    const auto last_nl = text.rfind('\n', upto == 0 ? 0 : upto - 1);
    const auto col = last_nl == std::string::npos || upto == 0 ? upto + 1 : upto - last_nl;
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
  const FieldReader rd(text, source);
  if (!doc.is_object()) throw ConfigError(source + ": top level must be an object");

  static const std::set<std::string> known{"a",       "b",      "c",     "model",   "gamma",   "seed",
                                           "samples", "burn_in", "stride", "ladder", "metrics", "out",
                                           "tol",     "n_horizon", "workers", "steps", "timing", "samples_file",
                                           "trials"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) rd.fail(key, "unknown field");
  }

  const bool shorthand = doc.contains("a") || doc.contains("b") || doc.contains("c");
  if (shorthand && doc.contains("model")) rd.fail("model", "give either a/b/c or model, not both");
  if (shorthand) {
    for (const char* key : {"a", "b", "c"}) {
      if (!doc.contains(key)) rd.fail(key, "a, b and c must be given together");
    }
    config.a = rd.matrix(doc["a"], "a");
    config.b = rd.matrix(doc["b"], "b");
    config.c = rd.matrix(doc["c"], "c");
  }
  if (doc.contains("model")) {
    const json& m = doc["model"];
    if (!m.is_object()) rd.fail("model", "expected an object with A, B and C");
    for (const char* key : {"A", "B", "C"}) {
      if (!m.contains(key)) rd.fail(std::string("model.") + key, "missing");
    }
    config.a = rd.matrix(m["A"], "model.A");
    config.b = rd.matrix(m["B"], "model.B");
    config.c = rd.matrix(m["C"], "model.C");
  }
  if (doc.contains("gamma")) {
    const json& g = doc["gamma"];
    config.gamma_grid.clear();
    if (g.is_array()) {
      for (std::size_t i = 0; i < g.size(); ++i) config.gamma_grid.push_back(rd.number(g[i], "gamma[" + std::to_string(i) + "]"));
    } else {
      config.gamma_grid.push_back(rd.number(g, "gamma"));
    }
    for (std::size_t i = 0; i < config.gamma_grid.size(); ++i) {
      const double x = config.gamma_grid[i];
      if (!(x >= 0.0 && x <= 1.0)) rd.fail("gamma[" + std::to_string(i) + "]", "must lie in [0, 1]");
    }
  }
  if (doc.contains("seed")) config.seed = rd.unsigned_int(doc["seed"], "seed");
  if (doc.contains("samples")) config.samples = rd.unsigned_int(doc["samples"], "samples");
  if (doc.contains("burn_in")) config.burn_in = rd.unsigned_int(doc["burn_in"], "burn_in");
  if (doc.contains("stride")) config.stride = rd.unsigned_int(doc["stride"], "stride");
  if (doc.contains("steps")) config.steps = rd.unsigned_int(doc["steps"], "steps");
  if (doc.contains("ladder")) config.ladder = rd.small_int(doc["ladder"], "ladder");
  if (doc.contains("n_horizon")) config.n_horizon = rd.small_int(doc["n_horizon"], "n_horizon");
  if (doc.contains("workers")) config.workers = rd.small_int(doc["workers"], "workers");
  if (doc.contains("trials")) config.trials = rd.small_int(doc["trials"], "trials");
  if (doc.contains("tol")) config.tol = rd.number(doc["tol"], "tol");
  if (doc.contains("out")) config.out = rd.string(doc["out"], "out");
  if (doc.contains("samples_file")) config.samples_file = rd.string(doc["samples_file"], "samples_file");
  if (doc.contains("timing")) {
    if (!doc["timing"].is_boolean()) rd.fail("timing", "expected true or false");
    config.timing = doc["timing"].get<bool>();
  }
  if (doc.contains("metrics")) {
    const json& m = doc["metrics"];
    std::vector<std::string> tokens;
    if (m.is_array()) {
      for (std::size_t i = 0; i < m.size(); ++i) tokens.push_back(rd.string(m[i], "metrics[" + std::to_string(i) + "]"));
    } else {
      tokens.push_back(rd.string(m, "metrics"));
    }
    try {
      config.metrics = parse_metrics(tokens);
    } catch (const ConfigError& e) {
      rd.fail("metrics", e.what());
    }
  }
  return config;
}

void validate_config(const ExperimentConfig& config, Command command) {
  if (config.gamma_grid.empty()) throw ConfigError("gamma: grid is empty");
  const bool zero_ok = command == Command::Simulate;
  for (double g : config.gamma_grid) {
    if (!(g <= 1.0 && (g > 0.0 || (zero_ok && g == 0.0)))) {
      throw ConfigError("gamma: " + format_double(g) + (zero_ok ? " must lie in [0, 1]" : " must lie in (0, 1]"));
    }
  }
  if (config.samples < 1) throw ConfigError("samples: must be at least 1");
  if (config.stride < 1) throw ConfigError("stride: must be at least 1");
  if (config.steps < 1) throw ConfigError("steps: must be at least 1");
  if (config.ladder < 1 || config.ladder > 30) throw ConfigError("ladder: must lie in [1, 30]");
  if (command == Command::Sweep && (config.samples >> (config.ladder - 1)) < 1) {
    throw ConfigError("ladder: samples / 2^(ladder-1) must be at least 1");
  }
  if (config.workers < 1) throw ConfigError("workers: must be at least 1");
  if (config.trials < 1) throw ConfigError("trials: must be at least 1");
  if (!(config.tol > 0.0)) throw ConfigError("tol: must be positive");
  if (config.metrics.empty()) throw ConfigError("metrics: at least one metric is required");
  if (command == Command::Means && config.samples_file.empty()) {
    throw ConfigError("means: a samples file is required (--samples-file)");
  }
  try {
    (void)config.model();
  } catch (const Error& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

ExperimentConfig parse_config(const ConfigOverrides& o, Command command) {
  ExperimentConfig config = default_config();
  if (o.config_path) {
    std::ifstream in(*o.config_path);
    if (!in) throw ConfigError(*o.config_path + ": cannot open config file");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    config = apply_config_json(std::move(config), text, *o.config_path);
  }
  if (o.gamma) config.gamma_grid = *o.gamma;
  if (o.seed) config.seed = *o.seed;
  if (o.samples) config.samples = *o.samples;
  if (o.burn_in) config.burn_in = *o.burn_in;
  if (o.stride) config.stride = *o.stride;
  if (o.steps) config.steps = *o.steps;
  if (o.ladder) config.ladder = *o.ladder;
  if (o.n_horizon) config.n_horizon = *o.n_horizon;
  if (o.workers) config.workers = *o.workers;
  if (o.trials) config.trials = *o.trials;
  if (o.metrics) config.metrics = parse_metrics(*o.metrics);
  if (o.out) config.out = *o.out;
  if (o.samples_file) config.samples_file = *o.samples_file;
  if (o.tol) config.tol = *o.tol;
  if (o.timing) config.timing = true;
  validate_config(config, command);
  return config;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace lgb::cli
