#pragma once

// JSON-lines serialization of SampleSet.
//
// Line 1 is a header record:
//   {"record":"header","schema":"lgb-samples/v1","fingerprint":"<16 hex>",
//    "gamma_bar":g,"seed":s,"burn_in":b,"stride":k,"dim":n,"count":N,"overflow":false}
// followed by one record per draw:
//   {"index":i,"matrix":[row-major n*n entries],"tau_since_arrival":t}

#include <iosfwd>

#include "lgb/ifs.hpp"

namespace lgb {

inline constexpr const char* kSampleSchema = "lgb-samples/v1";

void write_sample_set(std::ostream& out, const SampleSet& set);

/// Throws DomainError naming the offending line on malformed input.
SampleSet read_sample_set(std::istream& in);

}  // namespace lgb
