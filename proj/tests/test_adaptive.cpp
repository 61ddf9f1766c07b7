#include <gtest/gtest.h>

#include <cmath>

#include "explab/adaptive.hpp"
#include "explab/counter_rng.hpp"
#include "explab/errors.hpp"
#include "support.hpp"

using namespace explab;
using explab::testing::Gen;
using explab::testing::single_row_pair;

namespace {

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t v = 1;
  for (std::size_t i = 0; i < e; ++i) v *= b;
  return v;
}

PolicyTree random_tree(Gen& gen, std::size_t inputs, std::size_t outputs, std::size_t n) {
  PolicyTree tree(inputs, outputs, n);
  for (std::size_t d = 0; d < n; ++d) {
    for (std::size_t i = 0; i < ipow(inputs * outputs, d); ++i) {
      const auto dist = gen.probs(inputs);
      std::copy(dist.begin(), dist.end(), tree.node(d, i).begin());
    }
  }
  return tree;
}

TestFunction random_table(Gen& gen, std::size_t inputs, std::size_t outputs, std::size_t n) {
  std::vector<double> accept(ipow(inputs * outputs, n));
  for (double& a : accept) a = gen.uniform() < 0.3 ? std::round(gen.uniform()) : gen.uniform();
  return TestFunction::table(inputs, outputs, std::move(accept));
}

// Exhaustive minimum over deterministic two-step policies x1, x2(y1) with the
// pointwise Bayes test; independent of the backward-induction code.
double brute_force_two_step(const ChannelPair& pair, double prior) {
  const std::size_t nx = pair.inputs();
  const std::size_t ny = pair.outputs();
  const auto& w = pair.w().rows();
  const auto& wb = pair.wbar().rows();
  double best = kInf;
  for (std::size_t x1 = 0; x1 < nx; ++x1) {
    const std::size_t choices = ipow(nx, ny);
    for (std::size_t code = 0; code < choices; ++code) {
      double err = 0.0;
      std::size_t c = code;
      for (std::size_t y1 = 0; y1 < ny; ++y1) {
        const std::size_t x2 = c % nx;
        c /= nx;
        for (std::size_t y2 = 0; y2 < ny; ++y2) {
          const double a = prior * w[x1][y1] * w[x2][y2];
          const double b = (1 - prior) * wb[x1][y1] * wb[x2][y2];
          err += std::min(a, b);
        }
      }
      best = std::min(best, err);
    }
  }
  return best;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  double tv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] - b[i]);
  return 0.5 * tv;
}

}  // namespace

TEST(CounterRng, IsAPureFunctionOfItsKey) {
  const CounterRng a(5), b(5), c(6);
  EXPECT_EQ(a.bits(1, 2, 3), b.bits(1, 2, 3));
  EXPECT_NE(a.bits(1, 2, 3), c.bits(1, 2, 3));
  EXPECT_NE(a.bits(1, 2, 3), a.bits(1, 2, 4));
  EXPECT_NE(a.bits(0, 2, 3), a.bits(1, 2, 3));
  double mean = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = a.uniform(0, i, 0);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    mean += u;
  }
  EXPECT_NEAR(mean / 100000, 0.5, 0.005);
}

TEST(PolicyTree, IndexingAndValidation) {
  PolicyTree tree(2, 3, 3);
  const Step h[2] = {{1, 2}, {0, 1}};
  EXPECT_EQ(tree.index_of(History(h, 2)), (1 * 3 + 2) * 6 + 1);
  EXPECT_EQ(tree.at(History(h, 2))[0], 1.0);
  tree.set_deterministic(History(h, 2), 1);
  EXPECT_EQ(tree.at(History(h, 2))[1], 1.0);
  const double bad[2] = {0.5, 0.6};
  EXPECT_THROW(tree.set(History(h, 2), bad), InvalidDistribution);
}

TEST(TestFunction, RejectsValuesOutsideUnitInterval) {
  const TestFunction bad([](History, double, double) { return 1.5; });
  EXPECT_THROW(bad(History(), 0.5, 0.5), DomainError);
}

TEST(ExactErrors, ConstantTests) {
  Gen gen(41);
  const auto pair = gen.channel_pair(2, 3);
  const Policy policy(random_tree(gen, 2, 3, 3));
  const auto never = exact_errors(policy, TestFunction::constant(0.0), 3, pair);
  EXPECT_EQ(never.alpha, 0.0);
  EXPECT_NEAR(never.beta, 1.0, 1e-12);
  const auto always = exact_errors(policy, TestFunction::constant(1.0), 3, pair);
  EXPECT_NEAR(always.alpha, 1.0, 1e-12);
  EXPECT_EQ(always.beta, 0.0);
}

TEST(ExactErrors, OneStepHandComputation) {
  const auto pair = single_row_pair({0.6, 0.3, 0.1}, {0.2, 0.3, 0.5});
  // Accept W̄ only on the output with the largest ratio W̄/W (output 2).
  const TestFunction test = TestFunction::table(1, 3, {0.0, 0.0, 1.0});
  const auto e = exact_errors(Policy(PolicyTree::fixed_input(0, 1, 3, 1)), test, 1, pair);
  EXPECT_NEAR(e.alpha, 0.1, 1e-15);
  EXPECT_NEAR(e.beta, 0.5, 1e-15);
}

TEST(ExactErrors, DepthWeightsSumToOne) {
  Gen gen(42);
  const auto pair = gen.channel_pair(3, 2);
  const Policy policy(random_tree(gen, 3, 2, 4));
  for (const auto& [w, wb] : depth_weight_sums(policy, 4, pair)) {
    EXPECT_NEAR(w, 1.0, 1e-12);
    EXPECT_NEAR(wb, 1.0, 1e-12);
  }
}

TEST(ExactErrors, CallbackPolicyMatchesTree) {
  Gen gen(43);
  const auto pair = gen.channel_pair(2, 2);
  const PolicyTree tree = random_tree(gen, 2, 2, 3);
  const Policy callback(2, [&](History h, std::span<double> out) {
    const auto d = tree.at(h);
    std::copy(d.begin(), d.end(), out.begin());
  });
  const auto test = TestFunction::likelihood_ratio(0.4);
  const auto a = exact_errors(Policy(tree), test, 3, pair);
  const auto b = exact_errors(callback, test, 3, pair);
  EXPECT_EQ(a.alpha, b.alpha);
  EXPECT_EQ(a.beta, b.beta);
}

TEST(ExactErrors, ScaleLimit) {
  Gen gen(44);
  const auto pair = gen.channel_pair(4, 4);
  EXPECT_THROW(require_enumeration_scale(pair, 6), ScaleError);
  EXPECT_NO_THROW(require_enumeration_scale(pair, 5));
}

TEST(AdaptiveBayes, IdenticalChannelsGiveThePrior) {
  const auto pair = sec4_example(1.0, 1.0, 0.3, 0.6);
  EXPECT_NEAR(optimal_adaptive_bayes(3, pair, 0.3).error, 0.3, 1e-15);
  EXPECT_NEAR(optimal_fixed_input_bayes(5, 1, pair, 0.7), 0.3, 1e-15);
}

TEST(AdaptiveBayes, OneStepTotalVariationIdentity) {
  Gen gen(45);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pair = gen.channel_pair(2, 3);
    double tv = 0.0;
    for (std::size_t x = 0; x < 2; ++x) tv = std::max(tv, total_variation(pair.w().row(x), pair.wbar().row(x)));
    EXPECT_NEAR(optimal_adaptive_bayes(1, pair, 0.5).error, 0.5 * (1.0 - tv), 1e-14);
    EXPECT_NEAR(best_fixed_input_bayes(1, pair, 0.5).value, 0.5 * (1.0 - tv), 1e-14);
  }
}

TEST(AdaptiveBayes, MatchesBruteForceAtTwoSteps) {
  Gen gen(46);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pair = gen.channel_pair(gen.index(2, 3), gen.index(2, 3));
    const double prior = gen.uniform(0.2, 0.8);
    EXPECT_NEAR(optimal_adaptive_bayes(2, pair, prior).error, brute_force_two_step(pair, prior), 1e-14);
  }
}

TEST(AdaptiveBayes, ReturnedStrategyAttainsTheValue) {
  Gen gen(47);
  const auto pair = gen.channel_pair(2, 2);
  const auto res = optimal_adaptive_bayes(5, pair, 0.5);
  const auto e = exact_errors(Policy(res.policy), res.test, 5, pair);
  EXPECT_NEAR(0.5 * e.alpha + 0.5 * e.beta, res.error, 1e-14);
}

TEST(AdaptiveBayes, NeverWorseThanFixedInput) {
  Gen gen(48);
  for (int trial = 0; trial < 10; ++trial) {
    const auto pair = gen.channel_pair(2, 2);
    for (std::size_t n = 1; n <= 6; ++n) {
      EXPECT_LE(optimal_adaptive_bayes(n, pair, 0.5).error, best_fixed_input_bayes(n, pair, 0.5).value + 1e-14);
    }
  }
}

TEST(AdaptiveBayes, SerialAndParallelAgreeBitwise) {
  Gen gen(49);
  const auto pair = gen.channel_pair(2, 3);
  const auto a = optimal_adaptive_bayes(6, pair, 0.5, Exec::serial);
  const auto b = optimal_adaptive_bayes(6, pair, 0.5, Exec::parallel);
  EXPECT_EQ(a.error, b.error);
  EXPECT_EQ(a.policy, b.policy);
}

TEST(FixedInputBayes, TypeClassesMatchEnumeration) {
  Gen gen(50);
  const auto pair = gen.channel_pair(2, 3);
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto e = exact_errors(Policy(PolicyTree::fixed_input(1, 2, 3, n)), TestFunction::likelihood_ratio(0.3), n, pair);
    EXPECT_NEAR(optimal_fixed_input_bayes(n, 1, pair, 0.3), 0.3 * e.alpha + 0.7 * e.beta, 1e-14);
  }
}

TEST(FixedInputBayes, ChernoffRateAtFiveHundred) {
  const auto pair = single_row_pair({0.7, 0.3}, {0.5, 0.5});
  const double rate = -log_optimal_fixed_input_bayes(500, 0, pair, 0.5) / 500.0;
  EXPECT_NEAR(rate, chernoff(pair.row_pair(0)).value, 0.02);
}

TEST(NeymanPearson, Examples) {
  const auto pair = single_row_pair({0.7, 0.3}, {0.5, 0.5});
  EXPECT_EQ(neyman_pearson_exact(10, 0, pair, 1.0), 0.0);
  const double rate = -log_neyman_pearson_exact(200, 0, pair, 0.05) / 200.0;
  EXPECT_NEAR(rate, pair.row_pair(0).relative_entropy(), 0.05);
  // Disjoint supports: the W̄ outcomes never occur under W.
  EXPECT_EQ(neyman_pearson_exact(3, 0, single_row_pair({1.0, 0.0}, {0.0, 1.0}), 0.0), 0.0);
}

TEST(NeymanPearson, TypeIConstraintIsTight) {
  // n = 1, W = (0.5, 0.5), W̄ = (0.25, 0.75): rejecting W on output 1 has alpha 0.5.
  const auto pair = single_row_pair({0.5, 0.5}, {0.25, 0.75});
  EXPECT_NEAR(neyman_pearson_exact(1, 0, pair, 0.5), 0.25, 1e-15);
  // Randomizing on output 1 with probability 0.2 gives alpha 0.1, beta 1 - 0.2 * 0.75.
  EXPECT_NEAR(neyman_pearson_exact(1, 0, pair, 0.1), 0.85, 1e-15);
}

TEST(MonteCarlo, ConstantTestAndDeterminism) {
  Gen gen(51);
  const auto pair = gen.channel_pair(2, 2);
  const Policy policy(random_tree(gen, 2, 2, 3));
  EXPECT_EQ(monte_carlo_errors(policy, TestFunction::constant(0.0), 3, pair, 5000, 1).alpha, 0.0);
  const auto test = TestFunction::likelihood_ratio(0.5);
  const auto a = monte_carlo_errors(policy, test, 3, pair, 5000, 9, Exec::serial);
  const auto b = monte_carlo_errors(policy, test, 3, pair, 5000, 9, Exec::parallel);
  EXPECT_EQ(a.alpha, b.alpha);
  EXPECT_EQ(a.beta, b.beta);
  EXPECT_EQ(a.half_width_alpha, b.half_width_alpha);
}

TEST(MonteCarlo, ConsistentWithExactErrors) {
  const auto pair = sec4_example(100.0, 1.5, 1e-4, 0.65);
  const Policy policy(PolicyTree::fixed_input(1, 2, 2, 3));
  const auto test = TestFunction::likelihood_ratio(0.5);
  const auto exact = exact_errors(policy, test, 3, pair);
  int covered = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto est = monte_carlo_errors(policy, test, 3, pair, 20000, seed);
    covered += std::abs(est.alpha - exact.alpha) <= 4 * est.half_width_alpha &&
               std::abs(est.beta - exact.beta) <= 4 * est.half_width_beta;
  }
  EXPECT_GE(covered, 99);
}

TEST(Converse, HoldsOnRandomStrategies) {
  Gen gen(52);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pair = gen.channel_pair(2, 2, 0.01);
    const Policy policy(random_tree(gen, 2, 2, 4));
    const auto test = random_table(gen, 2, 2, 4);
    for (double s : {0.0, -0.1, -0.5, -1.0, -2.0}) {
      EXPECT_GE(converse_check(policy, test, 4, pair, s).slack, -kConverseSlackTolerance);
    }
    EXPECT_GE(weak_converse_check(policy, test, 4, pair).slack, -kConverseSlackTolerance);
  }
}

TEST(Converse, IdenticalChannelsAndTrivialTests) {
  const auto same = sec4_example(1.0, 1.0, 0.2, 0.4);
  const Policy policy(PolicyTree::fixed_input(0, 2, 2, 3));
  const auto test = TestFunction::constant(0.3);
  for (double s : {-0.5, -2.0}) {
    const auto c = converse_check(policy, test, 3, same, s);
    EXPECT_TRUE(c.holds);
    EXPECT_NEAR(c.slack, -s * std::log(0.7) - (1 - s) * std::log(0.7), 1e-12);
  }
  EXPECT_TRUE(weak_converse_check(policy, TestFunction::constant(0.0), 3, sec4_example(100, 1.5, 1e-4, 0.65)).holds);
  EXPECT_THROW(converse_check(policy, test, 3, same, 0.5), DomainError);
}
