#include "explab/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

namespace explab {

namespace {
std::atomic<int> g_override{0};
}

int worker_count() {
  if (int forced = g_override.load(); forced > 0) return forced;
  if (const char* env = std::getenv("EXPLAB_THREADS"); env != nullptr && *env != '\0') {
    try {
      int parsed = std::stoi(env);
      if (parsed >= 1) return parsed;
    } catch (const std::exception&) {
      // fall through to the OpenMP default
    }
  }
  return omp_get_max_threads();
}

void set_worker_count_override(int workers) { g_override.store(workers > 0 ? workers : 0); }

IndexedMax first_argmax(std::span<const double> values) {
  IndexedMax best{0, -std::numeric_limits<double>::infinity()};
  bool found = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double v = values[i];
    if (std::isnan(v)) continue;
    if (!found || v > best.value) {
      best = {i, v};
      found = true;
    }
  }
  return best;
}

double ordered_sum(std::span<const double> values) {
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

std::size_t block_count(std::size_t count, std::size_t block) { return (count + block - 1) / block; }

}  // namespace explab
