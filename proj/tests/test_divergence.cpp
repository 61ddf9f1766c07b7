#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "explab/distribution.hpp"
#include "explab/divergence.hpp"
#include "explab/errors.hpp"
#include "support.hpp"

using namespace explab;
using explab::testing::Gen;

TEST(Distribution, ValidatesEntries) {
  EXPECT_THROW(Distribution({0.5, 0.6}), InvalidDistribution);
  EXPECT_THROW(Distribution({-0.1, 1.1}), InvalidDistribution);
  EXPECT_THROW(Distribution({std::nan(""), 1.0}), InvalidDistribution);
  EXPECT_THROW(Distribution(std::vector<double>{}), InvalidDistribution);
  EXPECT_THROW(Distribution({"a", "a"}, {0.5, 0.5}), InvalidDistribution);
  EXPECT_THROW(Distribution({"a"}, {0.5, 0.5}), InvalidDistribution);
  EXPECT_NO_THROW(Distribution({0.3, 0.7}));
}

TEST(Distribution, NormalizedRescalesWeights) {
  const auto d = Distribution::normalized({1.0, 3.0});
  EXPECT_DOUBLE_EQ(d[0], 0.25);
  EXPECT_EQ(d.labels(), (std::vector<std::string>{"0", "1"}));
  EXPECT_THROW(Distribution::normalized({0.0, 0.0}), InvalidDistribution);
}

TEST(RelativeEntropy, Examples) {
  EXPECT_EQ(relative_entropy(Distribution({0.5, 0.5}), Distribution({0.5, 0.5})), 0.0);
  EXPECT_NEAR(relative_entropy(Distribution({1.0, 0.0}), Distribution({0.5, 0.5})), std::log(2.0), 1e-15);
  // 0.5 log 2 + 0.5 log(2/3)
  EXPECT_NEAR(relative_entropy(Distribution({0.5, 0.5}), Distribution({0.25, 0.75})), 0.143841036225890, 1e-12);
  EXPECT_EQ(relative_entropy(Distribution({0.5, 0.5}), Distribution({1.0, 0.0})), kInf);
}

TEST(RelativeEntropy, RejectsMismatchedAlphabets) {
  EXPECT_THROW(relative_entropy(Distribution({"a", "b"}, {0.5, 0.5}), Distribution({"a", "c"}, {0.5, 0.5})),
               AlphabetMismatch);
  EXPECT_THROW(relative_entropy(Distribution({0.5, 0.5}), Distribution({0.2, 0.3, 0.5})), AlphabetMismatch);
}

TEST(Phi, Examples) {
  const Distribution p{0.9, 0.1};
  const Distribution q{0.1, 0.9};
  EXPECT_EQ(phi(p, q, 0.0), 0.0);
  EXPECT_NEAR(phi(p, q, 0.5), std::log(0.6), 1e-15);
  EXPECT_NEAR(phi(Distribution({0.5, 0.5}), Distribution({0.25, 0.75}), 1.0), 0.0, 1e-15);
}

TEST(Phi, SupportConventions) {
  const Distribution p{0.5, 0.5};
  const Distribution q{1.0, 0.0};
  EXPECT_EQ(phi(p, q, 0.0), 0.0);
  EXPECT_EQ(phi(p, q, -0.5), kInf);                        // p > 0 = pbar below zero
  EXPECT_NEAR(phi(p, q, 0.5), 0.5 * std::log(0.5), 1e-15);  // common support only
  EXPECT_NEAR(phi(p, q, 1.0), 0.0, 1e-15);                  // 0^0 = 1
  EXPECT_EQ(phi(q, p, 1.5), kInf);                          // pbar > 0 = p above one
  EXPECT_NEAR(LogPair(p.probs(), q.probs()).phi_unit(0.0), std::log(0.5), 1e-15);
}

TEST(Phi, MatchesDirectSummation) {
  Gen gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = gen.probs(gen.index(2, 6), 0.001);
    const auto q = gen.probs(p.size(), 0.001);
    const double s = gen.uniform(-4.0, 4.0);
    const double expected = explab::testing::direct_phi(p, q, s);
    EXPECT_NEAR(LogPair(p, q).phi(s), expected, 1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST(Phi, ConvexInS) {
  Gen gen(12);
  for (int trial = 0; trial < 500; ++trial) {
    const auto p = gen.sparse_probs(gen.index(2, 5), 0.2);
    const auto q = gen.sparse_probs(p.size(), 0.2);
    const LogPair pair(p, q);
    double s[3] = {gen.uniform(-3, 3), gen.uniform(-3, 3), gen.uniform(-3, 3)};
    std::sort(s, s + 3);
    const double f1 = pair.phi(s[0]);
    const double f2 = pair.phi(s[1]);
    const double f3 = pair.phi(s[2]);
    if (!std::isfinite(f1) || !std::isfinite(f3) || s[2] - s[0] < 1e-9) continue;
    const double w = (s[1] - s[0]) / (s[2] - s[0]);
    EXPECT_LE(f2, (1.0 - w) * f1 + w * f3 + 1e-10);
  }
}

TEST(PhiDerivatives, Examples) {
  const Distribution p{0.5, 0.5};
  const auto same = phi_derivatives(p, p, 0.0);
  EXPECT_EQ(same.first, 0.0);
  EXPECT_EQ(same.second, 0.0);
  const auto d = phi_derivatives(p, Distribution({0.25, 0.75}), 0.0);
  EXPECT_NEAR(d.first, -0.143841036225890, 1e-12);
}

TEST(PhiDerivatives, MatchFiniteDifferences) {
  Gen gen(13);
  const double h = 1e-5;
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = gen.probs(gen.index(2, 5), 0.01);
    const auto q = gen.probs(p.size(), 0.01);
    const LogPair pair(p, q);
    const double s = gen.uniform(-2.0, 2.0);
    const auto d = pair.derivatives(s);
    const double fd1 = (pair.phi(s + h) - pair.phi(s - h)) / (2 * h);
    // phi'' is checked against differences of phi' (a second difference of phi
    // loses about ten digits to cancellation at this step).
    const double fd2 = (pair.derivatives(s + h).first - pair.derivatives(s - h).first) / (2 * h);
    EXPECT_NEAR(d.first, fd1, 1e-6 * std::max(1.0, std::abs(fd1)));
    EXPECT_NEAR(d.second, fd2, 1e-6 * std::max(1.0, std::abs(fd2)));
  }
}

TEST(PhiDerivatives, UndefinedWherePhiIsInfinite) {
  EXPECT_THROW(phi_derivatives(Distribution({0.5, 0.5}), Distribution({1.0, 0.0}), -1.0), UndefinedError);
}

TEST(Tilted, Endpoints) {
  const Distribution p{0.5, 0.5};
  const Distribution q{0.25, 0.75};
  EXPECT_EQ(tilted(p, q, 0.0), p);
  const auto t1 = tilted(p, q, 1.0);
  EXPECT_NEAR(t1[0], 0.25, 1e-15);
  EXPECT_NEAR(t1[1], 0.75, 1e-15);
  const auto mid = tilted(Distribution({0.9, 0.1}), Distribution({0.1, 0.9}), 0.5);
  EXPECT_NEAR(mid[0], 0.5, 1e-15);
  EXPECT_NEAR(mid[1], 0.5, 1e-15);
}

TEST(Tilted, SumsToOne) {
  Gen gen(14);
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = gen.sparse_probs(gen.index(2, 6), 0.3);
    const auto q = gen.sparse_probs(p.size(), 0.3);
    const LogPair pair(p, q);
    const double s = gen.uniform(-5.0, 5.0);
    if (!std::isfinite(pair.phi(s))) continue;
    std::vector<double> out(p.size());
    pair.tilt(s, out);
    double total = 0.0;
    for (double v : out) total += v;
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(TiltedIdentities, DivergenceToPbar) {
  Gen gen(15);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = gen.probs(gen.index(2, 5), 0.01);
    const auto q = gen.probs(p.size(), 0.01);
    const LogPair pair(p, q);
    const double s = gen.uniform(-5.0, 1.0);
    std::vector<double> ps(p.size());
    pair.tilt(s, ps);
    EXPECT_NEAR(pair.divergence_to_pbar(s), explab::testing::direct_kl(ps, q), 1e-9);
  }
}

TEST(TiltedIdentities, DivergenceFromP) {
  // D(P || P_s) = phi(s) - s phi'(0) holds as printed.
  Gen gen(16);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = gen.probs(gen.index(2, 5), 0.01);
    const auto q = gen.probs(p.size(), 0.01);
    const LogPair pair(p, q);
    const double s = gen.uniform(0.0, 5.0);
    std::vector<double> ps(p.size());
    pair.tilt(s, ps);
    const double identity = pair.phi(s) - s * pair.derivatives(0.0).first;
    EXPECT_NEAR(identity, explab::testing::direct_kl(p, ps), 1e-9);
  }
}

TEST(TiltedIdentities, DivergenceToPbarDecreases) {
  Gen gen(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = gen.probs(gen.index(2, 5), 0.01);
    const auto q = gen.probs(p.size(), 0.01);
    const LogPair pair(p, q);
    double prev = kInf;
    for (int i = 0; i < 200; ++i) {
      const double s = -5.0 + 6.0 * i / 199.0;
      const double d = pair.divergence_to_pbar(s);
      EXPECT_LT(d, prev);
      prev = d;
    }
  }
}

TEST(LlrStats, Examples) {
  const Distribution p{0.5, 0.5};
  const auto same = llr_stats(p, p);
  EXPECT_EQ(same.slope_R, 0.0);
  EXPECT_EQ(same.r0, 0.0);
  EXPECT_EQ(same.p_minus_infinity, p);

  const auto st = llr_stats(p, Distribution({0.25, 0.75}));
  EXPECT_NEAR(st.slope_R, std::log(0.5), 1e-15);
  EXPECT_NEAR(st.r0, -std::log(0.25), 1e-15);
  EXPECT_EQ(st.p_minus_infinity, Distribution({1.0, 0.0}));
}

TEST(LlrStats, TieSpreadsProportionally) {
  // Ratios pbar/p: 0.5, 0.5, 2 -> the first two tie at the minimum.
  const Distribution p{0.2, 0.4, 0.4};
  const Distribution q{0.1, 0.2, 0.7};
  const auto st = llr_stats(p, q);
  EXPECT_NEAR(st.p_minus_infinity[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(st.p_minus_infinity[1], 2.0 / 3.0, 1e-15);
  EXPECT_EQ(st.p_minus_infinity[2], 0.0);
  EXPECT_NEAR(st.slope_R, std::log(0.5), 1e-15);
}

TEST(LlrStats, PhiSlopeAtMinusInfinity) {
  Gen gen(18);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = gen.probs(gen.index(2, 5), 0.01);
    const auto q = gen.probs(p.size(), 0.01);
    const LogPair pair(p, q);
    std::vector<double> llr;
    for (std::size_t y = 0; y < p.size(); ++y) llr.push_back(std::log(q[y] / p[y]));
    std::sort(llr.begin(), llr.end());
    if (llr[1] - llr[0] < 0.02) continue;  // near-ties converge too slowly
    const double s = -2000.0;
    // phi(s) - s R -> log P(argmin set) as s -> -inf.
    EXPECT_NEAR(pair.phi(s) - s * pair.slope_R(), pair.asymptotic_intercept(), 1e-9);
  }
}
