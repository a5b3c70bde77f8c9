#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "fverify/binning.hpp"
#include "oracles.hpp"

using namespace fverify;

namespace {

void expect_conserved(const BinaryForecastSeries& s, const BinnedForecasts& b) {
  double events = 0.0;
  std::size_t count = 0;
  for (const auto& bin : b.bins) {
    events += bin.count * bin.event_frequency;
    count += bin.count;
    EXPECT_GT(bin.count, 0u);
  }
  EXPECT_EQ(count, s.size());
  EXPECT_NEAR(events, static_cast<double>(s.event_count()), 1e-9);
  ASSERT_EQ(b.recalibrated.size(), s.size());
}

void expect_tiles_unit_interval(const BinnedForecasts& b) {
  ASSERT_FALSE(b.bins.empty());
  EXPECT_EQ(b.bins.front().lower, 0.0);
  EXPECT_EQ(b.bins.back().upper, 1.0);
  for (std::size_t d = 1; d < b.bins.size(); ++d) {
    EXPECT_EQ(b.bins[d].lower, b.bins[d - 1].upper);
  }
}

}  // namespace

TEST(FixedBins, HandExample) {
  const oracle::Sample s{{0.05, 0.15, 0.95}, {0, 0, 1}};
  const auto b = binning::bin_fixed(oracle::series(s), binning::equal_width_thresholds(10));
  ASSERT_EQ(b.bins.size(), 3u);
  for (const auto& bin : b.bins) EXPECT_EQ(bin.count, 1u);
  EXPECT_EQ(b.recalibrated, (std::vector<double>{0.0, 0.0, 1.0}));
  expect_tiles_unit_interval(b);
}

TEST(FixedBins, SingleBin) {
  const oracle::Sample s{{0.31, 0.32, 0.33, 0.34}, {1, 0, 0, 0}};
  const auto b = binning::bin_fixed(oracle::series(s), binning::equal_width_thresholds(10));
  ASSERT_EQ(b.bins.size(), 1u);
  for (double v : b.recalibrated) EXPECT_EQ(v, 0.25);
}

TEST(FixedBins, RejectsDescendingThresholds) {
  const oracle::Sample s{{0.5}, {1}};
  const std::vector<double> t{0.5, 0.3};
  try {
    binning::bin_fixed(oracle::series(s), t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonAscendingThresholds);
  }
}

TEST(FixedBins, EdgesBelongToUpperBin) {
  const oracle::Sample s{{0.1, 0.1 - 1e-12, 1.0}, {1, 0, 1}};
  const std::vector<double> t{0.1};
  const auto b = binning::bin_fixed(oracle::series(s), t);
  ASSERT_EQ(b.bins.size(), 2u);
  EXPECT_EQ(b.bins[0].count, 1u);
  EXPECT_EQ(b.bins[1].count, 2u);
}

TEST(FixedBins, Presets) {
  EXPECT_EQ(binning::preset_thresholds(binning::Preset::kDraw5),
            (std::vector<double>{0.10, 0.15, 0.20, 0.25, 0.35}));
  EXPECT_EQ(binning::preset_thresholds(binning::Preset::kHomeWin10).size(), 9u);
  const auto awin = binning::preset_thresholds(binning::Preset::kAwayWin8);
  ASSERT_EQ(awin.size(), 7u);
  EXPECT_DOUBLE_EQ(awin.back(), 0.7);
  EXPECT_EQ(binning::parse_preset("draw5"), binning::Preset::kDraw5);
  EXPECT_FALSE(binning::parse_preset("nope").has_value());
}

TEST(QuantileBins, EqualCountSplit) {
  oracle::Sample s;
  for (int i = 0; i < 10; ++i) {
    s.p.push_back(0.05 + 0.09 * i);
    s.x.push_back(i % 2);
  }
  const auto b = binning::bin_quantile(oracle::series(s), 5);
  ASSERT_EQ(b.bins.size(), 5u);
  for (const auto& bin : b.bins) EXPECT_EQ(bin.count, 2u);
  expect_tiles_unit_interval(b);
}

TEST(QuantileBins, OneBinAndCollapse) {
  const oracle::Sample s{{0.2, 0.5, 0.7, 0.9, 0.1}, {1, 0, 0, 1, 1}};
  const auto one = binning::bin_quantile(oracle::series(s), 1);
  ASSERT_EQ(one.bins.size(), 1u);
  for (double v : one.recalibrated) EXPECT_DOUBLE_EQ(v, 0.6);
  const oracle::Sample same{{0.4, 0.4, 0.4, 0.4, 0.4}, {1, 0, 0, 1, 1}};
  EXPECT_EQ(binning::bin_quantile(oracle::series(same), 5).bins.size(), 1u);
  EXPECT_THROW(binning::bin_quantile(oracle::series(s), 6), Error);
  EXPECT_THROW(binning::bin_quantile(oracle::series(s), 0), Error);
}

TEST(Pav, NoViolators) {
  const oracle::Sample s{{0.1, 0.4, 0.7, 0.9}, {0, 0, 1, 1}};
  const auto b = binning::pav_calibrate(oracle::series(s));
  EXPECT_EQ(b.recalibrated, (std::vector<double>{0, 0, 1, 1}));
  EXPECT_EQ(b.bins.size(), 2u);
}

TEST(Pav, PoolsViolator) {
  const oracle::Sample s{{0.2, 0.4, 0.6}, {1, 0, 1}};
  const auto b = binning::pav_calibrate(oracle::series(s));
  EXPECT_EQ(b.recalibrated, (std::vector<double>{0.5, 0.5, 1.0}));
  // Agrees with the exhaustive block search.
  EXPECT_EQ(oracle::pav_exhaustive(s.p, s.x).fitted, b.recalibrated);
}

TEST(Pav, ConstantOutcomes) {
  for (int c : {0, 1}) {
    const oracle::Sample s{{0.9, 0.1, 0.5, 0.3}, {c, c, c, c}};
    const auto b = binning::pav_calibrate(oracle::series(s));
    EXPECT_EQ(b.bins.size(), 1u);
    for (double v : b.recalibrated) EXPECT_EQ(v, c);
  }
}

TEST(Pav, TiesArePooledFirst) {
  // Equal forecasts with different outcomes must receive the same fitted value.
  const oracle::Sample s{{0.5, 0.5, 0.2, 0.8}, {1, 0, 1, 1}};
  const auto b = binning::pav_calibrate(oracle::series(s));
  EXPECT_EQ(b.recalibrated[0], b.recalibrated[1]);
  EXPECT_EQ(oracle::pav_exhaustive(s.p, s.x).fitted, b.recalibrated);
}

TEST(Pav, MatchesExhaustiveOracle) {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 1 + rep % 10;
    const auto s = rep % 3 == 0 ? oracle::tied_sample(rng, n, 4) : oracle::uniform_sample(rng, n);
    const auto b = binning::pav_calibrate(oracle::series(s));
    const auto o = oracle::pav_exhaustive(s.p, s.x);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(b.recalibrated[i], o.fitted[i], 1e-12);
  }
}

TEST(Pav, StrictlyIncreasingBlocksAndIdempotent) {
  std::mt19937_64 rng(77);
  for (int rep = 0; rep < 100; ++rep) {
    const auto s = oracle::uniform_sample(rng, 50 + rep);
    const auto b = binning::pav_calibrate(oracle::series(s));
    for (std::size_t d = 1; d < b.bins.size(); ++d) {
      EXPECT_GT(b.bins[d].event_frequency, b.bins[d - 1].event_frequency);
      EXPECT_GT(b.bins[d].mean_forecast, b.bins[d - 1].mean_forecast);
    }
    expect_conserved(oracle::series(s), b);
    expect_tiles_unit_interval(b);
    // Refitting the fitted values reproduces them.
    binning::IsotonicRegression iso(s.p);
    const auto again = iso.fitted_values(iso.fit(b.recalibrated));
    for (std::size_t i = 0; i < s.p.size(); ++i) EXPECT_NEAR(again[i], b.recalibrated[i], 1e-12);
  }
}

TEST(Binning, ConservationAndCoverageAcrossMethods) {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 100; ++rep) {
    const auto s = oracle::uniform_sample(rng, 5 + rep * 3);
    const auto series = oracle::series(s);
    for (const auto& b :
         {binning::bin_fixed(series, binning::equal_width_thresholds(10)),
          binning::bin_fixed(series, binning::preset_thresholds(binning::Preset::kDraw5)),
          binning::bin_quantile(series, 1 + rep % 5), binning::pav_calibrate(series)}) {
      expect_conserved(series, b);
      expect_tiles_unit_interval(b);
    }
  }
}

TEST(Isotonic, EvaluateIsRightContinuousStep) {
  const std::vector<double> p{0.2, 0.4, 0.6};
  const std::vector<double> x{1, 0, 1};
  binning::IsotonicRegression iso(p);
  const auto blocks = iso.fit(x);
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(iso.evaluate(blocks, 0.2), 0.5);
  EXPECT_EQ(iso.evaluate(blocks, 0.59), 0.5);
  EXPECT_EQ(iso.evaluate(blocks, 0.6), 1.0);
  EXPECT_EQ(iso.evaluate(blocks, 0.95), 1.0);
}
