#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace explab {

// Every kernel accepts an execution switch. Both paths walk the same fixed
// block decomposition and reduce in index order, so results are bitwise
// identical regardless of the switch or the worker count.
enum class Exec { serial, parallel };

// Worker cap: EXPLAB_THREADS if set (>= 1), else the OpenMP default.
int worker_count();

// Overrides EXPLAB_THREADS for the current process; 0 clears the override.
void set_worker_count_override(int workers);

template <class Body>
void for_each_index(std::size_t count, Body&& body, Exec exec = Exec::parallel) {
  if (exec == Exec::serial || count < 2 || worker_count() == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (std::ptrdiff_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
}

// Evaluates f at every index into `out` (out.size() decides the count).
template <class F>
void evaluate_indexed(std::span<double> out, F&& f, Exec exec = Exec::parallel) {
  for_each_index(out.size(), [&](std::size_t i) { out[i] = f(i); }, exec);
}

struct IndexedMax {
  std::size_t index = 0;
  double value = 0.0;
};

// First index attaining the maximum (NaN entries are skipped; -inf allowed).
IndexedMax first_argmax(std::span<const double> values);

// Left-to-right sum; the single reduction order used by every kernel.
double ordered_sum(std::span<const double> values);

// Splits [0, count) into fixed blocks of `block` items (last block shorter).
std::size_t block_count(std::size_t count, std::size_t block);

}  // namespace explab
