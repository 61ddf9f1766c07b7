#pragma once

#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace explab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Entries must be >= 0 and sum to one within this tolerance.
inline constexpr double kProbabilityTolerance = 1e-12;

/// A finite probability vector over a labeled outcome alphabet.
///
/// Construction validates; a Distribution that exists is always a valid
/// probability vector with unique labels. Use `normalized` to rescale raw
/// weights explicitly.
class Distribution {
 public:
  Distribution(std::vector<std::string> labels, std::vector<double> probs);

  // Labels default to "0", "1", ...
  explicit Distribution(std::vector<double> probs);
  Distribution(std::initializer_list<double> probs) : Distribution(std::vector<double>(probs)) {}

  static Distribution normalized(std::vector<std::string> labels, std::vector<double> weights);
  static Distribution normalized(std::vector<double> weights);

  std::size_t size() const { return probs_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::span<const double> probs() const { return probs_; }
  double operator[](std::size_t i) const { return probs_[i]; }

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  std::vector<std::string> labels_;
  std::vector<double> probs_;
};

std::vector<std::string> index_labels(std::size_t count);

// Throws AlphabetMismatch unless both distributions carry the same label list.
void require_same_alphabet(const Distribution& p, const Distribution& q);

// Throws InvalidDistribution unless `probs` is a probability vector.
void validate_probabilities(std::span<const double> probs, const char* what);

}  // namespace explab
