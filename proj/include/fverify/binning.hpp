#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fverify/domain.hpp"

namespace fverify::binning {

// Bins [0,t1), [t1,t2), ..., [tk,1]. Thresholds must be strictly ascending
// inside (0,1). Empty bins are dropped; the neighbouring retained bin absorbs
// their range so the retained bins still tile [0,1].
BinnedForecasts bin_fixed(const BinaryForecastSeries& series,
                          std::span<const double> thresholds);

// Breakpoints at the type-7 sample quantiles k/D of the forecasts, duplicates
// merged. Requires 1 <= D <= N.
BinnedForecasts bin_quantile(const BinaryForecastSeries& series, std::size_t bin_count);

// Isotonic recalibration by pool-adjacent-violators; maximal constant blocks
// become bins with strictly increasing event frequencies.
BinnedForecasts pav_calibrate(const BinaryForecastSeries& series);

// k/D for k = 1..D-1.
std::vector<double> equal_width_thresholds(std::size_t bin_count);

enum class Preset { kHomeWin10, kDraw5, kAwayWin8 };

std::optional<Preset> parse_preset(std::string_view name);
std::vector<double> preset_thresholds(Preset preset);

// Least-squares non-decreasing fit of targets as a function of forecasts.
// The sort and tie grouping of the forecasts is done once, so the same
// instance can refit many target vectors (resampling loops).
class IsotonicRegression {
 public:
  struct Block {
    std::size_t first_group = 0;  // index into distinct_forecasts()
    std::size_t end_group = 0;    // one past the last group
    double target_sum = 0.0;
    double weight = 0.0;
    double value() const { return target_sum / weight; }
  };

  explicit IsotonicRegression(std::span<const double> forecasts);

  // Ties in the forecasts are pooled before fitting, so the fit is a function
  // of the forecast value. Returns blocks in ascending forecast order.
  std::vector<Block> fit(std::span<const double> targets) const;

  // Fitted value for each original observation.
  std::vector<double> fitted_values(const std::vector<Block>& blocks) const;

  // Right-continuous step function through the fitted blocks; requires
  // t >= smallest forecast.
  double evaluate(const std::vector<Block>& blocks, double t) const;

  std::span<const double> distinct_forecasts() const { return distinct_; }
  std::size_t group_of(std::size_t observation) const { return group_of_[observation]; }
  std::size_t size() const { return group_of_.size(); }

 private:
  std::vector<double> distinct_;
  std::vector<double> group_weight_;
  std::vector<std::size_t> group_of_;
};

}  // namespace fverify::binning
