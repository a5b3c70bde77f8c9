#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fverify/ingest.hpp"
#include "fverify/scoring.hpp"
#include "oracles.hpp"

using namespace fverify;

TEST(HalfBrier, Examples) {
  EXPECT_EQ(scoring::half_brier(1.0, 1), 0.0);
  EXPECT_EQ(scoring::half_brier(0.5, 0), 0.25);
  EXPECT_NEAR(scoring::half_brier(0.8, 0), 0.64, 1e-15);
}

TEST(Ignorance, Examples) {
  EXPECT_NEAR(scoring::ignorance(1.0, 1), 0.0, 1e-11);
  EXPECT_NEAR(scoring::ignorance(0.5, 1), std::log(2.0), 1e-15);
  EXPECT_NEAR(scoring::ignorance(0.0, 1, 1e-12), -std::log(1e-12), 1e-9);
  EXPECT_NEAR(scoring::ignorance(0.0, 1, 1e-12), 27.631, 5e-4);
  EXPECT_TRUE(std::isfinite(scoring::ignorance(1.0, 0)));
}

TEST(ZeroOne, Examples) {
  EXPECT_EQ(scoring::zero_one(0.8, 1), 0.0);
  EXPECT_EQ(scoring::zero_one(0.8, 0), 1.0);
  EXPECT_EQ(scoring::zero_one(0.5, 1), 0.5);
  EXPECT_EQ(scoring::zero_one(0.2, 0), 0.0);
}

TEST(Rps, Examples) {
  EXPECT_EQ(scoring::rps({1.0, 0.0, 0.0}, Category::kHome), 0.0);
  EXPECT_NEAR(scoring::rps({1.0 / 3, 1.0 / 3, 1.0 / 3}, Category::kHome), 5.0 / 18.0, 1e-15);
  EXPECT_NEAR(scoring::rps({0.0, 0.0, 1.0}, Category::kHome), 1.0, 1e-15);
}

TEST(Rps, PenalizesDistantMissMore) {
  // Same mass on the wrong categories, but farther from the outcome.
  EXPECT_LT(scoring::rps({0.5, 0.5, 0.0}, Category::kHome),
            scoring::rps({0.5, 0.0, 0.5}, Category::kHome));
}

TEST(MeanScore, Examples) {
  const oracle::Sample s{{0.8, 0.3, 0.6}, {1, 0, 1}};
  EXPECT_NEAR(scoring::mean_score(oracle::series(s), {}), 0.29 / 3.0, 1e-15);
  const oracle::Sample exact{{1.0, 0.0, 1.0}, {1, 0, 1}};
  EXPECT_EQ(scoring::mean_score(oracle::series(exact), {}), 0.0);
}

TEST(MeanScore, ClimatologicalEqualsUncertainty) {
  const oracle::Sample s{{0.4, 0.4, 0.4, 0.4, 0.4}, {1, 0, 1, 0, 0}};
  EXPECT_DOUBLE_EQ(scoring::mean_score(oracle::series(s), {}), 0.4 * 0.6);
}

TEST(MeanScore, RpsRejectedForBinarySeries) {
  const oracle::Sample s{{0.5}, {1}};
  EXPECT_THROW(scoring::mean_score(oracle::series(s), {scoring::RuleKind::kRankedProbability}),
               std::exception);
}

TEST(MeanScore, MulticlassBrierSumsOneVsAll) {
  const auto s = ingest::parse_forecast_csv(
                     "match_id,p_home,p_draw,p_away,outcome\nm1,0.5,0.3,0.2,H\n")
                     .series;
  double total = 0.0;
  for (Category c : kAllCategories) total += scoring::mean_score(ingest::one_vs_all(s, c), {});
  EXPECT_NEAR(total, 0.38, 1e-15);
}

// Expected score under event probability q is minimized at p = q.
TEST(Propriety, HalfBrierGrid) {
  for (int qi = 1; qi <= 9; ++qi) {
    const double q = qi / 10.0;
    int best = -1;
    double best_score = 1e9;
    for (int pi = 0; pi <= 100; ++pi) {
      const double p = pi / 100.0;
      const double e = q * scoring::half_brier(p, 1) + (1 - q) * scoring::half_brier(p, 0);
      if (e < best_score - 1e-15) {
        best_score = e;
        best = pi;
      }
    }
    EXPECT_EQ(best, qi * 10) << "q=" << q;
  }
}

TEST(Propriety, IgnoranceGrid) {
  for (int qi = 1; qi <= 9; ++qi) {
    const double q = qi / 10.0;
    int best = -1;
    double best_score = 1e9;
    for (int pi = 0; pi <= 100; ++pi) {
      const double p = pi / 100.0;
      const double e = q * scoring::ignorance(p, 1) + (1 - q) * scoring::ignorance(p, 0);
      if (e < best_score - 1e-15) {
        best_score = e;
        best = pi;
      }
    }
    EXPECT_EQ(best, qi * 10) << "q=" << q;
  }
}

TEST(MeanScore, PermutationInvariant) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    auto s = oracle::uniform_sample(rng, 2 + rep * 7);
    const double before = scoring::mean_score(oracle::series(s), {});
    std::vector<std::size_t> idx(s.p.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    oracle::Sample t;
    for (std::size_t i : idx) {
      t.p.push_back(s.p[i]);
      t.x.push_back(s.x[i]);
    }
    EXPECT_NEAR(scoring::mean_score(oracle::series(t), {}), before, 1e-15);
    EXPECT_NEAR(before, oracle::brier(s.p, s.x), 1e-14);
  }
}
