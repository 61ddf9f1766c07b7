#pragma once

#include <cstdint>

namespace explab {

// Stateless counter-based generator: every draw is a pure function of
// (seed, stream, trial, step), so trials can run in any order or in parallel.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t stream, std::uint64_t trial, std::uint64_t step) const;

  // Uniform in [0, 1) with 53 random bits.
  double uniform(std::uint64_t stream, std::uint64_t trial, std::uint64_t step) const;

  static std::uint64_t mix(std::uint64_t x);

 private:
  std::uint64_t seed_;
};

}  // namespace explab
