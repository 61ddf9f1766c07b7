#include "explab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "explab/errors.hpp"

namespace explab {

namespace {

template <class T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw IoError(std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw IoError(std::string("field \"") + key + "\" has the wrong type: " + e.what());
  }
}

std::size_t label_index(const std::vector<std::string>& labels, const std::string& label, const char* what) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return i;
  }
  throw DomainError(std::string("unknown ") + what + " label \"" + label + "\"");
}

std::vector<Step> parse_history(const std::string& text, const ChannelPair& pair) {
  std::vector<Step> steps;
  if (text.empty()) return steps;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, '/')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw IoError("history step \"" + item + "\" is not of the form x:y");
    steps.push_back({label_index(pair.w().input_labels(), item.substr(0, colon), "input"),
                     label_index(pair.w().output_labels(), item.substr(colon + 1), "output")});
  }
  return steps;
}

std::vector<double> input_distribution_from_json(const Json& j, const ChannelPair& pair) {
  std::vector<double> dist(pair.inputs(), 0.0);
  if (j.is_string()) {
    dist[label_index(pair.w().input_labels(), j.get<std::string>(), "input")] = 1.0;
  } else if (j.is_object()) {
    for (const auto& [label, prob] : j.items()) {
      if (!prob.is_number()) throw IoError("policy probabilities must be numbers");
      dist[label_index(pair.w().input_labels(), label, "input")] = prob.get<double>();
    }
    validate_probabilities(dist, "policy entry");
  } else {
    throw IoError("policy entries must be an input label or {label: probability}");
  }
  return dist;
}

ComplexMatrix matrix_from_json(const Json& j, std::size_t dim) {
  std::vector<Json> entries;
  if (!j.is_array()) throw IoError("state matrix must be an array");
  const bool nested = !j.empty() && j[0].is_array() && !j[0].empty() && j[0][0].is_array();
  if (nested) {
    for (const auto& row : j) {
      for (const auto& e : row) entries.push_back(e);
    }
  } else {
    for (const auto& e : j) entries.push_back(e);
  }
  if (entries.size() != dim * dim) throw IoError("state matrix has the wrong number of entries");
  ComplexMatrix m(dim, dim);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& e = entries[k];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw IoError("complex entries must be [re, im] pairs");
    }
    m(static_cast<Eigen::Index>(k / dim), static_cast<Eigen::Index>(k % dim)) =
        std::complex<double>(e[0].get<double>(), e[1].get<double>());
  }
  return m;
}

DensityMatrix bloch_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw IoError("Bloch vectors must have three components");
  for (const auto& v : j) {
    if (!v.is_number()) throw IoError("Bloch components must be numbers");
  }
  return DensityMatrix::from_bloch(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open \"" + path + "\"");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw IoError("malformed JSON in \"" + path + "\": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write \"" + path + "\"");
  out << text;
  if (!out) throw IoError("write to \"" + path + "\" failed");
}

std::string format_number(double v) {
  if (std::isnan(v)) throw DomainError("refusing to format NaN");
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Json json_number(double v) {
  if (std::isinf(v) || std::isnan(v)) return format_number(v);
  return std::stod(format_number(v));
}

Json to_json(const Distribution& d) {
  Json probs = Json::array();
  for (double p : d.probs()) probs.push_back(p);
  return {{"labels", d.labels()}, {"probs", probs}};
}

Distribution distribution_from_json(const Json& j) {
  return Distribution(field<std::vector<std::string>>(j, "labels"), field<std::vector<double>>(j, "probs"));
}

Json to_json(const ChannelPair& pair) {
  return {{"input_labels", pair.w().input_labels()},
          {"output_labels", pair.w().output_labels()},
          {"W", pair.w().rows()},
          {"Wbar", pair.wbar().rows()}};
}

ChannelPair channel_pair_from_json(const Json& j) {
  const auto inputs = field<std::vector<std::string>>(j, "input_labels");
  const auto outputs = field<std::vector<std::string>>(j, "output_labels");
  return ChannelPair(Channel(inputs, outputs, field<std::vector<std::vector<double>>>(j, "W")),
                     Channel(inputs, outputs, field<std::vector<std::vector<double>>>(j, "Wbar")));
}

std::pair<DensityMatrix, DensityMatrix> state_pair_from_json(const Json& j) {
  if (!j.is_object()) throw IoError("state file must be a JSON object");
  if (j.contains("bloch_rho") || j.contains("bloch_sigma")) {
    if (!j.contains("bloch_rho") || !j.contains("bloch_sigma")) {
      throw IoError("Bloch shorthand needs both bloch_rho and bloch_sigma");
    }
    return {bloch_from_json(j["bloch_rho"]), bloch_from_json(j["bloch_sigma"])};
  }
  const auto dim = field<std::size_t>(j, "dim");
  if (dim == 0) throw IoError("dim must be positive");
  if (!j.contains("rho") || !j.contains("sigma")) throw IoError("state file needs rho and sigma");
  return {DensityMatrix(matrix_from_json(j["rho"], dim)), DensityMatrix(matrix_from_json(j["sigma"], dim))};
}

Json to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      row.push_back(Json::array({json_number(m(i, k).real()), json_number(m(i, k).imag())}));
    }
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const Povm& m) {
  Json elements = Json::array();
  for (const auto& e : m.elements()) elements.push_back(to_json(e));
  return elements;
}

std::string history_string(History history, const ChannelPair& pair) {
  std::string out;
  for (std::size_t k = 0; k < history.size(); ++k) {
    if (k > 0) out += '/';
    out += pair.w().input_labels()[history[k].input] + ":" + pair.w().output_labels()[history[k].output];
  }
  return out;
}

PolicyFile policy_from_json(const Json& j, const ChannelPair& pair, std::size_t n, double prior) {
  if (!j.is_object()) throw IoError("policy file must be a JSON object");
  std::vector<double> fallback(pair.inputs(), 0.0);
  fallback[0] = 1.0;
  if (j.contains("policy_default")) fallback = input_distribution_from_json(j["policy_default"], pair);

  std::map<std::vector<std::size_t>, std::vector<double>> nodes;
  auto key_of = [](History h) {
    std::vector<std::size_t> key;
    for (const auto& step : h) {
      key.push_back(step.input);
      key.push_back(step.output);
    }
    return key;
  };
  if (j.contains("policy")) {
    if (!j["policy"].is_object()) throw IoError("\"policy\" must be an object keyed by history");
    for (const auto& [history, entry] : j["policy"].items()) {
      const auto steps = parse_history(history, pair);
      if (steps.size() >= std::max<std::size_t>(n, 1)) throw DomainError("policy history \"" + history + "\" is too long");
      nodes[key_of(steps)] = input_distribution_from_json(entry, pair);
    }
  }
  Policy policy(pair.inputs(), [nodes = std::move(nodes), fallback, key_of](History h, std::span<double> out) {
    const auto it = nodes.find(key_of(h));
    const auto& dist = it == nodes.end() ? fallback : it->second;
    std::copy(dist.begin(), dist.end(), out.begin());
  });

  if (!j.contains("test") || (j["test"].is_string() && j["test"].get<std::string>() == "bayes")) {
    return {std::move(policy), TestFunction::likelihood_ratio(prior)};
  }
  if (!j["test"].is_object()) throw IoError("\"test\" must be \"bayes\" or an object keyed by transcript");
  double test_default = 0.0;
  if (j.contains("test_default")) {
    if (!j["test_default"].is_number()) throw IoError("test_default must be a number");
    test_default = j["test_default"].get<double>();
  }
  std::map<std::vector<std::size_t>, double> table;
  for (const auto& [transcript, value] : j["test"].items()) {
    if (!value.is_number()) throw IoError("test values must be numbers");
    const auto steps = parse_history(transcript, pair);
    if (steps.size() != n) throw DomainError("test transcript \"" + transcript + "\" does not have length n");
    table[key_of(steps)] = value.get<double>();
  }
  TestFunction test([table = std::move(table), test_default, key_of](History h, double, double) {
    const auto it = table.find(key_of(h));
    return it == table.end() ? test_default : it->second;
  });
  return {std::move(policy), std::move(test)};
}

}  // namespace explab
