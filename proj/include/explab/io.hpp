#pragma once

#include <json.hpp>
#include <string>

#include "explab/adaptive.hpp"
#include "explab/channel.hpp"
#include "explab/quantum.hpp"

namespace explab {

using Json = nlohmann::json;

// Reads and parses a JSON file; IoError on unreadable or malformed input.
Json read_json_file(const std::string& path);
void write_text(const std::string& path, const std::string& text);

// "%.12g", with infinities as "inf" / "-inf". NaN is a bug and throws.
std::string format_number(double v);
// Number rounded to 12 significant digits, or the string "inf" / "-inf".
Json json_number(double v);

// {"labels": [...], "probs": [...]}
Json to_json(const Distribution& d);
Distribution distribution_from_json(const Json& j);

// {"input_labels": [...], "output_labels": [...], "W": [[...]], "Wbar": [[...]]}
Json to_json(const ChannelPair& pair);
ChannelPair channel_pair_from_json(const Json& j);

// {"dim": d, "rho": [[re, im], ...], "sigma": [...]} (row-major; nested rows are
// also accepted) or {"bloch_rho": [x, y, z], "bloch_sigma": [x, y, z]}.
std::pair<DensityMatrix, DensityMatrix> state_pair_from_json(const Json& j);
Json to_json(const ComplexMatrix& m);
Json to_json(const Povm& m);

// Policy files map history strings "x1:y1/x2:y2" (labels; "" is the root) to
// an input label or {label: probability}; unlisted histories use
// "policy_default". "test" maps full transcripts to acceptance probabilities
// with "test_default" elsewhere; "test": "bayes" selects the likelihood-ratio
// test at the run's prior (also the default when "test" is absent).
struct PolicyFile {
  Policy policy;
  TestFunction test;
};
PolicyFile policy_from_json(const Json& j, const ChannelPair& pair, std::size_t n, double prior);

std::string history_string(History history, const ChannelPair& pair);

}  // namespace explab
