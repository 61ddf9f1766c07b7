#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "explab/channel.hpp"
#include "explab/distribution.hpp"

namespace explab::testing {

// Hand-rolled generators for the property tests. All draw from a caller-owned
// engine so every test is reproducible from its seed.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  std::size_t index(std::size_t lo, std::size_t hi) {  // inclusive
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
  }

  // Probability vector with every entry >= floor.
  std::vector<double> probs(std::size_t k, double floor = 0.0) {
    std::vector<double> v(k);
    double total = 0.0;
    for (double& x : v) {
      x = -std::log(uniform(1e-12, 1.0));  // Dirichlet(1,...,1)
      total += x;
    }
    for (double& x : v) x = floor + (1.0 - floor * static_cast<double>(k)) * x / total;
    return fix_sum(v);
  }

  // Same, but with each entry zeroed with probability `zero_rate` (at least one kept).
  std::vector<double> sparse_probs(std::size_t k, double zero_rate) {
    std::vector<double> v = probs(k);
    const std::size_t keep = index(0, k - 1);
    for (std::size_t i = 0; i < k; ++i) {
      if (i != keep && uniform() < zero_rate) v[i] = 0.0;
    }
    double total = 0.0;
    for (double x : v) total += x;
    for (double& x : v) x /= total;
    return fix_sum(v);
  }

  Distribution distribution(std::size_t k, double floor = 0.0) { return Distribution(probs(k, floor)); }

  ChannelPair channel_pair(std::size_t inputs, std::size_t outputs, double floor = 0.0) {
    std::vector<std::vector<double>> w, wbar;
    for (std::size_t x = 0; x < inputs; ++x) {
      w.push_back(probs(outputs, floor));
      wbar.push_back(probs(outputs, floor));
    }
    auto in = index_labels(inputs);
    auto out = index_labels(outputs);
    return ChannelPair(Channel(in, out, w), Channel(in, out, wbar));
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  // Puts the rounding residue on the largest entry so the sum is 1 to machine precision.
  static std::vector<double> fix_sum(std::vector<double> v) {
    double total = 0.0;
    std::size_t top = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      total += v[i];
      if (v[i] > v[top]) top = i;
    }
    v[top] += 1.0 - total;
    return v;
  }

  std::mt19937_64 engine_;
};

inline ChannelPair single_row_pair(std::vector<double> w, std::vector<double> wbar) {
  auto out = index_labels(w.size());
  return ChannelPair(Channel({"0"}, out, {std::move(w)}), Channel({"0"}, out, {std::move(wbar)}));
}

// phi by direct summation of p^(1-s) pbar^s over the common support (0 < s < 1 or full support).
inline double direct_phi(const std::vector<double>& p, const std::vector<double>& q, double s) {
  double acc = 0.0;
  for (std::size_t y = 0; y < p.size(); ++y) {
    if (p[y] > 0.0 && q[y] > 0.0) acc += std::pow(p[y], 1.0 - s) * std::pow(q[y], s);
  }
  return std::log(acc);
}

inline double direct_kl(const std::vector<double>& p, const std::vector<double>& q) {
  double acc = 0.0;
  for (std::size_t y = 0; y < p.size(); ++y) {
    if (p[y] > 0.0) acc += p[y] * std::log(p[y] / q[y]);
  }
  return acc;
}

inline std::vector<double> to_vector(const Distribution& d) { return {d.probs().begin(), d.probs().end()}; }

}  // namespace explab::testing
