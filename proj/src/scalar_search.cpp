#include "explab/scalar_search.hpp"

#include <cmath>

#include "explab/errors.hpp"

namespace explab {

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
  if (count < 2) throw DomainError("grid needs at least two points");
  std::vector<double> grid(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i + 1 < count; ++i) grid[i] = lo + step * static_cast<double>(i);
  grid[count - 1] = hi;
  return grid;
}

ScalarOptimum golden_maximize(const std::function<double(double)>& f, double lo, double hi,
                              double width_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int iter = 0; iter < 200 && (b - a) > width_tol; ++iter) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? ScalarOptimum{c, fc} : ScalarOptimum{d, fd};
}

ScalarOptimum grid_then_golden(const std::function<double(double)>& f, std::span<const double> grid,
                               Exec exec) {
  std::vector<double> values(grid.size());
  evaluate_indexed(values, [&](std::size_t i) { return f(grid[i]); }, exec);
  const auto best = first_argmax(values);
  ScalarOptimum result{grid[best.index], best.value};
  if (!std::isfinite(best.value)) return result;
  const std::size_t lo = best.index == 0 ? 0 : best.index - 1;
  const std::size_t hi = best.index + 1 < grid.size() ? best.index + 1 : best.index;
  if (lo == hi) return result;
  const auto polished = golden_maximize(f, grid[lo], grid[hi]);
  if (polished.value > result.value) result = polished;
  return result;
}

}  // namespace explab
