#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fverify/decomposition.hpp"
#include "fverify/discrimination.hpp"
#include "oracles.hpp"

using namespace fverify;

namespace {

oracle::Sample two_classes(std::vector<double> zero, std::vector<double> one) {
  oracle::Sample s;
  for (double p : zero) {
    s.p.push_back(p);
    s.x.push_back(0);
  }
  for (double p : one) {
    s.p.push_back(p);
    s.x.push_back(1);
  }
  return s;
}

}  // namespace

TEST(Summary, HandExample) {
  const auto d = discrimination::discrimination_summary(oracle::series(two_classes({0.2, 0.4}, {0.6, 0.8})));
  EXPECT_EQ(d.n0, 2u);
  EXPECT_EQ(d.n1, 2u);
  EXPECT_NEAR(d.m0, 0.3, 1e-15);
  EXPECT_NEAR(d.m1, 0.7, 1e-15);
  EXPECT_NEAR(d.diff, 0.4, 1e-15);
  EXPECT_EQ(d.c_statistic, 1.0);
  EXPECT_EQ(d.ks.statistic, 1.0);
  EXPECT_NEAR(d.class0.median, 0.3, 1e-15);
}

TEST(Summary, DegenerateClass) {
  try {
    discrimination::discrimination_summary(oracle::series(two_classes({0.2, 0.4}, {})));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateClass);
  }
}

TEST(Wilcoxon, HandExample) {
  const auto t = discrimination::wilcoxon_test(oracle::series(two_classes({0.2, 0.4}, {0.6, 0.8})));
  // W = 7, mu = 5, sigma = sqrt(4 * 5 / 12)
  EXPECT_NEAR(t.statistic, 2.0 / std::sqrt(20.0 / 12.0), 1e-12);
  EXPECT_NEAR(t.statistic, 1.549, 5e-4);
  EXPECT_NEAR(t.p_value, 0.0607, 5e-4);
  EXPECT_EQ(t.sidedness, inference::Sidedness::kOneSidedUpper);
  const auto exact =
      discrimination::wilcoxon_exact_test(oracle::series(two_classes({0.2, 0.4}, {0.6, 0.8})));
  EXPECT_NEAR(exact.p_value, 1.0 / 6.0, 1e-15);
}

TEST(Wilcoxon, IdenticalClasses) {
  const auto t =
      discrimination::wilcoxon_test(oracle::series(two_classes({0.2, 0.5, 0.7}, {0.7, 0.2, 0.5})));
  EXPECT_NEAR(t.statistic, 0.0, 1e-15);
  EXPECT_NEAR(t.p_value, 0.5, 1e-15);
}

TEST(Wilcoxon, ZeroVariance) {
  try {
    discrimination::wilcoxon_test(oracle::series(two_classes({0.3, 0.3}, {0.3})));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroVariance);
  }
}

TEST(Wilcoxon, TieCorrectedVariance) {
  // Variance with ties: n0 n1 / 12 * [(N + 1) - sum(t^3 - t) / (N (N - 1))].
  const auto s = two_classes({0.1, 0.3, 0.3, 0.5}, {0.3, 0.5, 0.9});
  const double n0 = 4, n1 = 3, n = 7;
  const double ties = (27 - 3) + (8 - 2);
  const double var = n0 * n1 / 12.0 * ((n + 1) - ties / (n * (n - 1)));
  // midranks: 0.1->1, 0.3->3, 0.5->5.5, 0.9->7
  const double w = 3 + 5.5 + 7;
  const double z = (w - n1 * (n + 1) / 2.0) / std::sqrt(var);
  EXPECT_NEAR(discrimination::wilcoxon_test(oracle::series(s)).statistic, z, 1e-12);
}

TEST(Wilcoxon, ExactMatchesEnumerationOracle) {
  std::mt19937_64 rng(41);
  int checked = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 2 + rep % 11;
    const auto s = rep % 2 ? oracle::tied_sample(rng, n, 5) : oracle::uniform_sample(rng, n);
    const auto c = oracle::class_moments(s.p, s.x);
    if (c.n0 == 0 || c.n1 == 0) continue;
    const auto t = discrimination::wilcoxon_exact_test(oracle::series(s));
    EXPECT_NEAR(t.p_value, oracle::wilcoxon_exact_p(s.p, s.x), 1e-12);
    ++checked;
  }
  EXPECT_GT(checked, 200);
}

TEST(Wilcoxon, ExactRejectsLargeSamples) {
  std::mt19937_64 rng(1);
  auto s = oracle::uniform_sample(rng, discrimination::kExactWilcoxonMaxN + 1);
  s.x[0] = 0;
  s.x[1] = 1;
  try {
    discrimination::wilcoxon_exact_test(oracle::series(s));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSampleTooLarge);
  }
}

TEST(Ks, Examples) {
  EXPECT_EQ(discrimination::ks_test(oracle::series(two_classes({0.2, 0.6}, {0.4, 0.8}))).statistic, 0.5);
  const auto same = discrimination::ks_test(oracle::series(two_classes({0.2, 0.6}, {0.6, 0.2})));
  EXPECT_EQ(same.statistic, 0.0);
  EXPECT_EQ(same.p_value, 1.0);
}

TEST(Ks, MatchesStepwiseOracle) {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    const auto s = rep % 2 ? oracle::tied_sample(rng, 20 + rep, 6) : oracle::uniform_sample(rng, 20 + rep);
    const auto c = oracle::class_moments(s.p, s.x);
    if (c.n0 == 0 || c.n1 == 0) continue;
    double d = 0.0;
    for (double t : s.p) {
      double f0 = 0, f1 = 0;
      for (std::size_t i = 0; i < s.p.size(); ++i) {
        if (s.p[i] <= t) (s.x[i] ? f1 : f0) += 1.0;
      }
      d = std::max(d, std::abs(f0 / c.n0 - f1 / c.n1));
    }
    const auto t = discrimination::ks_test(oracle::series(s));
    EXPECT_NEAR(t.statistic, d, 1e-15);
    EXPECT_GE(t.p_value, 0.0);
    EXPECT_LE(t.p_value, 1.0);
  }
}

TEST(CStatistic, PairCountingAndIdentities) {
  std::mt19937_64 rng(29);
  for (int rep = 0; rep < 300; ++rep) {
    const auto s = rep % 2 ? oracle::tied_sample(rng, 3 + rep, 7) : oracle::uniform_sample(rng, 3 + rep);
    const auto c = oracle::class_moments(s.p, s.x);
    if (c.n0 == 0 || c.n1 == 0) continue;
    const auto series = oracle::series(s);
    EXPECT_EQ(discrimination::c_statistic(series), oracle::c_pairs(s.p, s.x));
    const auto d = discrimination::discrimination_summary(series);
    const auto y = decomposition::yates_decompose(series);
    EXPECT_EQ(d.diff, y.extra("b"));
    EXPECT_EQ(d.n0 + d.n1, s.p.size());
  }
}
