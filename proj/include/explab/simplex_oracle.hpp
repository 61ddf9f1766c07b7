#pragma once

#include <vector>

#include "explab/distribution.hpp"
#include "explab/parallel.hpp"

namespace explab {

// Brute-force minimizers over the probability simplex. They share no code with
// the sup-over-s search and exist to cross-check it.
struct OracleResult {
  double value = 0.0;
  std::vector<double> q;    // minimizing distribution
  double constraint = 0.0;  // D(q || P̄) at the minimizer
};

// Largest alphabet the simplex oracles enumerate.
inline constexpr std::size_t kOracleMaxOutcomes = 5;

// min { D(Q||P) : D(Q||P̄) <= r }. Composition grid (step 1/400 up to four
// outcomes, 1/100 for five) plus local coordinate-pair refinement.
// Throws ScaleError past kOracleMaxOutcomes, DomainError for r < 0.
OracleResult hoeffding_oracle(double r, const Distribution& p, const Distribution& pbar,
                              Exec exec = Exec::parallel);

// min { D(Q||P) + r - D(Q||P̄) : D(Q||P̄) <= r } on the same grid.
OracleResult hk_oracle(double r, const Distribution& p, const Distribution& pbar,
                       Exec exec = Exec::parallel);

// The same two problems with Q restricted to the tilted family P_s: the
// constraint is solved for s by bisection and the objective evaluated by
// direct relative entropies of the tilted law.
double hoeffding_tilted_oracle(double r, const Distribution& p, const Distribution& pbar);
double hk_tilted_oracle(double r, const Distribution& p, const Distribution& pbar);

}  // namespace explab
