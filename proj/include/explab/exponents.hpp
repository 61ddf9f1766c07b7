#pragma once

#include <functional>
#include <vector>

#include "explab/distribution.hpp"
#include "explab/divergence.hpp"
#include "explab/parallel.hpp"

namespace explab {

enum class Regime { interior, boundary_s0, boundary_s1, beyond_r0 };

const char* to_string(Regime regime);

struct BoundResult {
  double value = 0.0;     // nats, may be +inf
  double argmax_s = 0.0;  // optimizing tilt; -inf when only the s -> -inf limit attains
  Regime regime = Regime::interior;
};

// Number of grid cells used by every one-dimensional tilt search.
inline constexpr std::size_t kTiltGridCells = 4096;

// -min over s in [0,1] of phi (continuous extension at the endpoints).
BoundResult chernoff(const LogPair& pair, Exec exec = Exec::parallel);

// Hoeffding bound B_e(r) = sup_{0<=s<1} (-s r - phi(s)) / (1 - s). Throws DomainError for r < 0.
BoundResult hoeffding(double r, const LogPair& pair, Exec exec = Exec::parallel);

// Han-Kobayashi bound B_e*(r) = sup_{s<=0} (-s r - phi(s)) / (1 - s). Returns 0 for
// r <= D(P||P̄); continues linearly with slope one past r0.
BoundResult han_kobayashi(double r, const LogPair& pair, Exec exec = Exec::parallel);

// sup over s <= 0 of (-s r - phi(s)) / (1 - s) for an arbitrary convex phi with phi(0) = 0,
// searched in t = s / (s - 1) on [0, 1) with the t -> 1 limit r + slope appended.
// Ties resolve to the smallest |s|. Shared by the pair and channel bounds;
// expensive cumulants may pass a coarser grid.
BoundResult sup_nonpositive_tilt(double r, const std::function<double(double)>& phi, double slope,
                                 Exec exec = Exec::parallel, std::size_t cells = kTiltGridCells);

BoundResult chernoff(const Distribution& p, const Distribution& pbar, Exec exec = Exec::parallel);
BoundResult hoeffding(double r, const Distribution& p, const Distribution& pbar,
                      Exec exec = Exec::parallel);
BoundResult han_kobayashi(double r, const Distribution& p, const Distribution& pbar,
                          Exec exec = Exec::parallel);

struct CurvePoint {
  double r;
  double value;
};

// B̄_e(r): B_e(r) up to D(P||P̄), then -B_e*(r). r_grid must be nonnegative and ascending.
std::vector<CurvePoint> be_bar_curve(const Distribution& p, const Distribution& pbar,
                                     const std::vector<double>& r_grid, Exec exec = Exec::parallel);

}  // namespace explab
