#include "lgb/sample_io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

namespace lgb {

namespace {

using json = nlohmann::ordered_json;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

[[noreturn]] void corrupt(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::DomainError, "sample file line " + std::to_string(line) + ": " + what);
}

}  // namespace

void write_sample_set(std::ostream& out, const SampleSet& set) {
  const Index dim = set.draws.empty() ? 0 : set.draws.front().dim();
  json header = {{"record", "header"},
                 {"schema", kSampleSchema},
                 {"fingerprint", hex64(set.fingerprint)},
                 {"gamma_bar", set.gamma_bar},
                 {"seed", set.seed},
                 {"burn_in", set.burn_in},
                 {"stride", set.stride},
                 {"dim", dim},
                 {"count", set.draws.size()},
                 {"overflow", set.overflow}};
  out << header.dump() << '\n';
  for (std::size_t i = 0; i < set.draws.size(); ++i) {
    const Matrix& m = set.draws[i].matrix();
    json entries = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
      for (Index c = 0; c < m.cols(); ++c) entries.push_back(m(r, c));
    }
    json record = {{"index", i}, {"matrix", std::move(entries)}, {"tau_since_arrival", set.tau[i]}};
    out << record.dump() << '\n';
  }
}

SampleSet read_sample_set(std::istream& in) {
  SampleSet set;
  std::string text;
  std::size_t line_no = 0;
  Index dim = 0;
  std::size_t expected = 0;
  bool have_header = false;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.empty()) continue;
    json rec;
    try {
      rec = json::parse(text);
    } catch (const json::parse_error& e) {
      corrupt(line_no, e.what());
    }
    try {
      if (!have_header) {
        if (rec.value("record", "") != "header") corrupt(line_no, "expected header record");
        if (rec.at("schema").get<std::string>() != kSampleSchema) corrupt(line_no, "unknown schema");
        set.fingerprint = std::stoull(rec.at("fingerprint").get<std::string>(), nullptr, 16);
        set.gamma_bar = rec.at("gamma_bar").get<double>();
        set.seed = rec.at("seed").get<std::uint64_t>();
        set.burn_in = rec.at("burn_in").get<std::size_t>();
        set.stride = rec.at("stride").get<std::size_t>();
        dim = rec.at("dim").get<Index>();
        expected = rec.at("count").get<std::size_t>();
        set.overflow = rec.value("overflow", false);
        if (dim < 1 && expected > 0) corrupt(line_no, "dimension must be positive");
        have_header = true;
        continue;
      }
      const auto index = rec.at("index").get<std::size_t>();
      if (index != set.draws.size()) corrupt(line_no, "draw index out of sequence");
      const auto& entries = rec.at("matrix");
      if (!entries.is_array() || entries.size() != static_cast<std::size_t>(dim * dim)) {
        corrupt(line_no, "matrix must have " + std::to_string(dim * dim) + " entries");
      }
      Matrix m(dim, dim);
      for (Index r = 0; r < dim; ++r) {
        for (Index c = 0; c < dim; ++c) m(r, c) = entries.at(static_cast<std::size_t>(r * dim + c)).get<double>();
      }
      set.draws.emplace_back(m);
      set.tau.push_back(rec.at("tau_since_arrival").get<int>());
    } catch (const json::exception& e) {
      corrupt(line_no, e.what());
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::DomainError) throw;
      corrupt(line_no, e.what());
    } catch (const std::logic_error& e) {
      corrupt(line_no, e.what());
    }
  }
  if (!have_header) corrupt(line_no, "missing header record");
  if (set.draws.size() != expected) {
    corrupt(line_no, "header announces " + std::to_string(expected) + " draws, found " +
                         std::to_string(set.draws.size()));
  }
  return set;
}

}  // namespace lgb
