#include "explab/simplex_oracle.hpp"

#include <cmath>
#include <functional>

#include "explab/divergence.hpp"
#include "explab/errors.hpp"

namespace explab {

namespace {

enum class Objective { hoeffding, han_kobayashi };

struct Problem {
  Objective kind;
  double r;
  std::vector<double> p;
  std::vector<double> pbar;
};

// Term of D(Q||ref) contributed by one outcome.
double kl_term(double q, double ref) {
  if (q == 0.0) return 0.0;
  if (ref == 0.0) return kInf;
  return q * (std::log(q) - std::log(ref));
}

// HK objective without the constant r: sum_y q log(p̄/p).
double hk_term(double q, double p, double pbar) {
  if (q == 0.0) return 0.0;
  if (pbar == 0.0) return kInf;  // infeasible anyway
  if (p == 0.0) return kInf;
  return q * (std::log(pbar) - std::log(p));
}

double objective_term(const Problem& prob, std::size_t y, double q) {
  return prob.kind == Objective::hoeffding ? kl_term(q, prob.p[y])
                                           : hk_term(q, prob.p[y], prob.pbar[y]);
}

struct Candidate {
  double objective = kInf;
  double constraint = kInf;
  std::vector<double> q;
};

Candidate evaluate(const Problem& prob, const std::vector<double>& q) {
  Candidate c{0.0, 0.0, q};
  for (std::size_t y = 0; y < q.size(); ++y) {
    c.objective += objective_term(prob, y, q[y]);
    c.constraint += kl_term(q[y], prob.pbar[y]);
  }
  return c;
}

bool feasible(const Problem& prob, const Candidate& c) { return c.constraint <= prob.r; }

// Best feasible composition with first coordinate fixed to j0 / steps.
Candidate scan_slice(const Problem& prob, std::size_t steps, std::size_t j0,
                     const std::vector<std::vector<double>>& obj,
                     const std::vector<std::vector<double>>& con) {
  const std::size_t k = prob.p.size();
  Candidate best;
  std::vector<std::size_t> counts(k, 0);
  counts[0] = j0;
  bool found = false;
  double best_obj = kInf;
  std::vector<std::size_t> best_counts;
  std::function<void(std::size_t, std::size_t, double, double)> recurse =
      [&](std::size_t y, std::size_t remaining, double o, double c) {
        if (y == k - 1) {
          counts[y] = remaining;
          const double total_o = o + obj[y][remaining];
          const double total_c = c + con[y][remaining];
          if (total_c <= prob.r && (!found || total_o < best_obj)) {
            found = true;
            best_obj = total_o;
            best_counts = counts;
          }
          return;
        }
        for (std::size_t j = 0; j <= remaining; ++j) {
          counts[y] = j;
          recurse(y + 1, remaining - j, o + obj[y][j], c + con[y][j]);
        }
      };
  if (k == 1) {
    if (j0 == steps) {
      best_counts = counts;
      found = con[0][steps] <= prob.r;
    }
  } else {
    recurse(1, steps - j0, obj[0][j0], con[0][j0]);
  }
  if (!found) return best;
  std::vector<double> q(k);
  for (std::size_t y = 0; y < k; ++y) q[y] = static_cast<double>(best_counts[y]) / static_cast<double>(steps);
  return evaluate(prob, q);
}

// Follows the ray from P̄ through z to the boundary of the feasible set: the
// point where D(.||P̄) reaches r, or the simplex face if that comes first.
// D(.||P̄) is convex along the ray and zero at P̄, so bisection applies.
Candidate boundary_point(const Problem& prob, const std::vector<double>& z) {
  const std::size_t k = z.size();
  std::vector<double> dir(k);
  double reach = kInf;
  bool moves = false;
  for (std::size_t y = 0; y < k; ++y) {
    dir[y] = z[y] - prob.pbar[y];
    if (dir[y] != 0.0) moves = true;
    if (dir[y] < 0.0) reach = std::min(reach, prob.pbar[y] / -dir[y]);
  }
  auto at = [&](double lambda) {
    std::vector<double> q(k);
    for (std::size_t y = 0; y < k; ++y) q[y] = std::max(0.0, prob.pbar[y] + lambda * dir[y]);
    return evaluate(prob, q);
  };
  if (!moves) return at(0.0);
  Candidate edge = at(reach);
  if (feasible(prob, edge)) return edge;
  double lo = 0.0;
  double hi = reach;
  for (int iter = 0; iter < 80; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(prob, at(mid))) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return at(lo);
}

// Pattern search over ray directions with coordinate-pair moves and step
// halving. Every evaluated point lies on the feasible boundary, where both
// optima live whenever the unconstrained minimizer is infeasible.
void refine(const Problem& prob, Candidate& best) {
  const std::size_t k = best.q.size();
  std::vector<double> z = best.q;
  double step = 1.0 / 400.0;
  for (int halving = 0; halving < 50; ++halving) {
    for (int sweep = 0; sweep < 100; ++sweep) {
      bool improved = false;
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          if (i == j || z[i] == 0.0) continue;
          std::vector<double> trial_z = z;
          const double delta = std::min(step, trial_z[i]);
          trial_z[i] -= delta;
          trial_z[j] += delta;
          Candidate trial = boundary_point(prob, trial_z);
          if (feasible(prob, trial) && trial.objective < best.objective) {
            best = std::move(trial);
            z = std::move(trial_z);
            improved = true;
          }
        }
      }
      if (!improved) break;
    }
    step /= 2.0;
  }
}

OracleResult solve(const Problem& prob, Exec exec) {
  const std::size_t k = prob.p.size();
  if (k > kOracleMaxOutcomes) throw ScaleError("simplex oracle supports at most 5 outcomes");
  if (!(prob.r >= 0.0)) throw DomainError("simplex oracle: rate r must be nonnegative");
  if (prob.r == 0.0) {
    // Only P̄ is feasible; refinement would wander inside the rounding noise of D(Q || P̄).
    const Candidate c = evaluate(prob, prob.pbar);
    const double value = prob.kind == Objective::hoeffding ? c.objective : c.objective + prob.r;
    return {value, c.q, c.constraint};
  }
  const std::size_t steps = k <= 4 ? 400 : 100;

  std::vector<std::vector<double>> obj(k, std::vector<double>(steps + 1));
  std::vector<std::vector<double>> con(k, std::vector<double>(steps + 1));
  for (std::size_t y = 0; y < k; ++y) {
    for (std::size_t j = 0; j <= steps; ++j) {
      const double q = static_cast<double>(j) / static_cast<double>(steps);
      con[y][j] = kl_term(q, prob.pbar[y]);
      obj[y][j] = con[y][j] == kInf ? kInf : objective_term(prob, y, q);
    }
  }

  std::vector<Candidate> slices(steps + 1);
  for_each_index(steps + 1, [&](std::size_t j0) { slices[j0] = scan_slice(prob, steps, j0, obj, con); },
                 exec);
  Candidate best;
  for (auto& c : slices) {
    if (!c.q.empty() && (best.q.empty() || c.objective < best.objective)) best = std::move(c);
  }
  // P and P̄ themselves are always candidates; P̄ is the only feasible point at r = 0.
  for (const auto* seed : {&prob.pbar, &prob.p}) {
    Candidate c = evaluate(prob, *seed);
    if (feasible(prob, c) && (best.q.empty() || c.objective < best.objective)) best = std::move(c);
  }
  if (best.q.empty()) return {kInf, {}, kInf};
  refine(prob, best);
  const double value = prob.kind == Objective::hoeffding ? best.objective : best.objective + prob.r;
  return {value, best.q, best.constraint};
}

Problem make_problem(Objective kind, double r, const Distribution& p, const Distribution& pbar) {
  require_same_alphabet(p, pbar);
  return {kind, r, {p.probs().begin(), p.probs().end()}, {pbar.probs().begin(), pbar.probs().end()}};
}

// Smallest-bracket bisection for the s at which D(P_s || P̄) crosses r; the
// divergence is decreasing in s.
double solve_tilt(const LogPair& pair, std::span<const double> pbar, double r, double lo, double hi) {
  std::vector<double> law(pbar.size());
  auto divergence_at = [&](double s) {
    pair.tilt(s, law);
    return relative_entropy(law, pbar);
  };
  for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (divergence_at(mid) > r) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace

OracleResult hoeffding_oracle(double r, const Distribution& p, const Distribution& pbar, Exec exec) {
  return solve(make_problem(Objective::hoeffding, r, p, pbar), exec);
}

OracleResult hk_oracle(double r, const Distribution& p, const Distribution& pbar, Exec exec) {
  return solve(make_problem(Objective::han_kobayashi, r, p, pbar), exec);
}

double hoeffding_tilted_oracle(double r, const Distribution& p, const Distribution& pbar) {
  require_same_alphabet(p, pbar);
  if (!(r >= 0.0)) throw DomainError("tilted oracle: rate r must be nonnegative");
  if (relative_entropy(p, pbar) <= r) return 0.0;
  const LogPair pair(p.probs(), pbar.probs());
  // On [0, 1] the objective D(P_s||P) increases and the constraint decreases,
  // so the optimum is the smallest feasible s.
  const double s = solve_tilt(pair, pbar.probs(), r, 0.0, 1.0);
  std::vector<double> law(p.size());
  pair.tilt(s, law);
  return relative_entropy(law, p.probs());
}

double hk_tilted_oracle(double r, const Distribution& p, const Distribution& pbar) {
  require_same_alphabet(p, pbar);
  const double d = relative_entropy(p, pbar);
  if (r <= d) return 0.0;
  const LogPair pair(p.probs(), pbar.probs());
  const auto stats = llr_stats(p, pbar);
  if (r >= stats.r0) {
    return relative_entropy(stats.p_minus_infinity.probs(), p.probs()) + r - stats.r0;
  }
  std::vector<double> law(p.size());
  double lo = -1.0;
  for (;; lo *= 2.0) {
    pair.tilt(lo, law);
    if (relative_entropy(law, pbar.probs()) > r || lo < -1e6) break;
  }
  const double s = solve_tilt(pair, pbar.probs(), r, lo, 0.0);
  pair.tilt(s, law);
  return relative_entropy(law, p.probs()) + r - relative_entropy(law, pbar.probs());
}

}  // namespace explab
