#pragma once

#include <functional>
#include <span>
#include <vector>

#include "explab/parallel.hpp"

namespace explab {

struct ScalarOptimum {
  double x = 0.0;
  double value = 0.0;
};

// Evenly spaced grid with `count` points from lo to hi inclusive; the last
// point is exactly hi.
std::vector<double> linear_grid(double lo, double hi, std::size_t count);

// Maximizes f over [lo, hi] by golden-section search. f should be unimodal on
// the bracket. Stops once the bracket is narrower than `width_tol`.
ScalarOptimum golden_maximize(const std::function<double(double)>& f, double lo, double hi,
                              double width_tol = 1e-11);

// Dense scan of `grid` followed by a golden-section polish inside the two
// neighbouring cells of the first grid maximizer. The polished point is kept
// only if it strictly improves on the grid value, so ties keep resolving to
// the earliest grid point.
ScalarOptimum grid_then_golden(const std::function<double(double)>& f, std::span<const double> grid,
                               Exec exec = Exec::parallel);

}  // namespace explab
