#include "explab/counter_rng.hpp"

namespace explab {

std::uint64_t CounterRng::mix(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t CounterRng::bits(std::uint64_t stream, std::uint64_t trial, std::uint64_t step) const {
  std::uint64_t h = mix(seed_);
  h = mix(h ^ stream);
  h = mix(h ^ trial);
  return mix(h ^ step);
}

double CounterRng::uniform(std::uint64_t stream, std::uint64_t trial, std::uint64_t step) const {
  return static_cast<double>(bits(stream, trial, step) >> 11) * 0x1.0p-53;
}

}  // namespace explab
