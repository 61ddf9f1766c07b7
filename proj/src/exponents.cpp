#include "explab/exponents.hpp"

#include <cmath>

#include "explab/errors.hpp"
#include "explab/scalar_search.hpp"

namespace explab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kHoeffdingEdge = 1.0 - 1e-9;

Regime regime_for(double s) {
  if (s == 0.0) return Regime::boundary_s0;
  if (s == 1.0) return Regime::boundary_s1;
  return Regime::interior;
}

const std::vector<double>& unit_grid() {
  static const std::vector<double> grid = linear_grid(0.0, 1.0, kTiltGridCells + 1);
  return grid;
}

const std::vector<double>& hoeffding_grid() {
  static const std::vector<double> grid = linear_grid(0.0, kHoeffdingEdge, kTiltGridCells + 1);
  return grid;
}

// t_i = i / cells for i < cells; t = 1 is handled as an analytic limit.
std::vector<double> compact_grid(std::size_t cells) {
  std::vector<double> g(cells);
  for (std::size_t i = 0; i < cells; ++i) g[i] = static_cast<double>(i) / static_cast<double>(cells);
  return g;
}

const std::vector<double>& compact_grid() {
  static const std::vector<double> grid = compact_grid(kTiltGridCells);
  return grid;
}

}  // namespace

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::interior: return "interior";
    case Regime::boundary_s0: return "boundary_s0";
    case Regime::boundary_s1: return "boundary_s1";
    case Regime::beyond_r0: return "beyond_r0";
  }
  return "interior";
}

BoundResult chernoff(const LogPair& pair, Exec exec) {
  auto objective = [&](double s) { return -pair.phi_unit(s); };
  const auto best = grid_then_golden(objective, unit_grid(), exec);
  return {best.value, best.x, regime_for(best.x)};
}

BoundResult hoeffding(double r, const LogPair& pair, Exec exec) {
  if (!(r >= 0.0)) throw DomainError("hoeffding: rate r must be nonnegative");
  const double d = pair.relative_entropy();
  if (r >= d) return {0.0, 0.0, Regime::boundary_s0};
  if (r == 0.0) return {pair.reverse_relative_entropy(), 1.0, Regime::boundary_s1};
  // Near s = 1 the numerator tends to -r - phi(1); when that is positive the
  // constraint set is empty and the bound is infinite.
  if (-r - pair.phi_unit(1.0) > 0.0) return {kInf, 1.0, Regime::boundary_s1};
  auto objective = [&](double s) { return (-s * r - pair.phi_unit(s)) / (1.0 - s); };
  const auto best = grid_then_golden(objective, hoeffding_grid(), exec);
  return {best.value, best.x, regime_for(best.x)};
}

BoundResult sup_nonpositive_tilt(double r, const std::function<double(double)>& phi, double slope,
                                 Exec exec, std::size_t cells) {
  auto objective = [&](double t) {
    const double s = -t / (1.0 - t);
    const double value = phi(s);
    if (value == kInf) return kNegInf;
    return t * r - (1.0 - t) * value;
  };
  const auto best = cells == kTiltGridCells ? grid_then_golden(objective, compact_grid(), exec)
                                             : grid_then_golden(objective, compact_grid(cells), exec);
  const double limit = r + slope;
  if (limit > best.value) return {limit, kNegInf, Regime::interior};
  const double s = -best.x / (1.0 - best.x);
  return {best.value, s, s == 0.0 ? Regime::boundary_s0 : Regime::interior};
}

BoundResult han_kobayashi(double r, const LogPair& pair, Exec exec) {
  if (std::isnan(r)) throw DomainError("han_kobayashi: rate r is NaN");
  const double d = pair.relative_entropy();
  if (r <= d) return {0.0, 0.0, Regime::boundary_s0};
  const double slope = pair.slope_R();
  const double r0 = pair.r0();
  auto phi = [&](double s) { return pair.phi(s); };
  if (r > r0) {
    const auto at_r0 = sup_nonpositive_tilt(r0, phi, slope, exec);
    return {at_r0.value + (r - r0), kNegInf, Regime::beyond_r0};
  }
  return sup_nonpositive_tilt(r, phi, slope, exec);
}

BoundResult chernoff(const Distribution& p, const Distribution& pbar, Exec exec) {
  require_same_alphabet(p, pbar);
  return chernoff(LogPair(p.probs(), pbar.probs()), exec);
}

BoundResult hoeffding(double r, const Distribution& p, const Distribution& pbar, Exec exec) {
  require_same_alphabet(p, pbar);
  return hoeffding(r, LogPair(p.probs(), pbar.probs()), exec);
}

BoundResult han_kobayashi(double r, const Distribution& p, const Distribution& pbar, Exec exec) {
  require_same_alphabet(p, pbar);
  return han_kobayashi(r, LogPair(p.probs(), pbar.probs()), exec);
}

std::vector<CurvePoint> be_bar_curve(const Distribution& p, const Distribution& pbar,
                                     const std::vector<double>& r_grid, Exec exec) {
  require_same_alphabet(p, pbar);
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (!(r_grid[i] >= 0.0)) throw DomainError("be_bar_curve: rates must be nonnegative");
    if (i > 0 && r_grid[i] < r_grid[i - 1]) throw DomainError("be_bar_curve: rates must ascend");
  }
  const LogPair pair(p.probs(), pbar.probs());
  const double d = pair.relative_entropy();
  std::vector<CurvePoint> curve;
  curve.reserve(r_grid.size());
  for (double r : r_grid) {
    const double value = r <= d ? hoeffding(r, pair, exec).value : -han_kobayashi(r, pair, exec).value;
    curve.push_back({r, value});
  }
  return curve;
}

}  // namespace explab
