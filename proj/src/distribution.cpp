#include "explab/distribution.hpp"

#include <cmath>
#include <numeric>
#include <set>

#include "explab/errors.hpp"

namespace explab {

void validate_probabilities(std::span<const double> probs, const char* what) {
  if (probs.empty()) throw InvalidDistribution(std::string(what) + ": empty probability vector");
  double total = 0.0;
  for (double v : probs) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidDistribution(std::string(what) + ": entries must be finite and nonnegative");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) {
    throw InvalidDistribution(std::string(what) + ": entries sum to " + std::to_string(total) +
                              ", expected 1");
  }
}

std::vector<std::string> index_labels(std::size_t count) {
  std::vector<std::string> labels;
  labels.reserve(count);
  for (std::size_t i = 0; i < count; ++i) labels.push_back(std::to_string(i));
  return labels;
}

Distribution::Distribution(std::vector<std::string> labels, std::vector<double> probs)
    : labels_(std::move(labels)), probs_(std::move(probs)) {
  if (labels_.size() != probs_.size()) {
    throw InvalidDistribution("distribution: label count does not match probability count");
  }
  if (std::set<std::string>(labels_.begin(), labels_.end()).size() != labels_.size()) {
    throw InvalidDistribution("distribution: labels must be unique");
  }
  validate_probabilities(probs_, "distribution");
}

Distribution::Distribution(std::vector<double> probs) : labels_(index_labels(probs.size())) {
  probs_ = std::move(probs);
  validate_probabilities(probs_, "distribution");
}

Distribution Distribution::normalized(std::vector<std::string> labels, std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidDistribution("normalize: weights must be finite and nonnegative");
    }
    total += w;
  }
  if (!(total > 0.0)) throw InvalidDistribution("normalize: weights sum to zero");
  for (double& w : weights) w /= total;
  return Distribution(std::move(labels), std::move(weights));
}

Distribution Distribution::normalized(std::vector<double> weights) {
  auto labels = index_labels(weights.size());
  return normalized(std::move(labels), std::move(weights));
}

void require_same_alphabet(const Distribution& p, const Distribution& q) {
  if (p.labels() != q.labels()) {
    throw AlphabetMismatch("distributions are defined over different outcome alphabets");
  }
}

}  // namespace explab
