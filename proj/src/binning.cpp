#include "fverify/binning.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "fverify/stats.hpp"

namespace fverify::binning {

namespace {

void check_thresholds(std::span<const double> thresholds) {
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    const double t = thresholds[k];
    if (!(t > 0.0 && t < 1.0)) {
      throw Error(ErrorCode::kNonAscendingThresholds,
                  fmt::format("threshold {} = {} is not inside (0,1)", k, t));
    }
    if (k > 0 && !(t > thresholds[k - 1])) {
      throw Error(ErrorCode::kNonAscendingThresholds,
                  fmt::format("threshold {} = {} does not exceed {}", k, t,
                              thresholds[k - 1]));
    }
  }
}

BinnedForecasts bin_by_thresholds(const BinaryForecastSeries& series,
                                  std::span<const double> thresholds, BinningMethod method) {
  const std::size_t cells = thresholds.size() + 1;
  std::vector<std::size_t> cell_of(series.size());
  std::vector<stats::CompensatedSum> p_sum(cells);
  std::vector<std::size_t> x_sum(cells, 0);
  std::vector<std::size_t> count(cells, 0);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double p = series.forecast(i);
    const auto cell = static_cast<std::size_t>(
        std::upper_bound(thresholds.begin(), thresholds.end(), p) - thresholds.begin());
    cell_of[i] = cell;
    p_sum[cell].add(p);
    x_sum[cell] += static_cast<std::size_t>(series.outcome(i));
    ++count[cell];
  }

  BinnedForecasts out;
  out.method = method;
  std::vector<std::size_t> retained_index(cells, 0);
  for (std::size_t c = 0; c < cells; ++c) {
    if (count[c] == 0) continue;
    Bin bin;
    bin.lower = out.bins.empty() ? 0.0 : thresholds[c - 1];
    bin.count = count[c];
    bin.mean_forecast = p_sum[c].value() / static_cast<double>(count[c]);
    bin.event_frequency = static_cast<double>(x_sum[c]) / static_cast<double>(count[c]);
    if (!out.bins.empty()) out.bins.back().upper = bin.lower;
    retained_index[c] = out.bins.size();
    out.bins.push_back(bin);
  }
  out.bins.back().upper = 1.0;

  out.recalibrated.resize(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    out.recalibrated[i] = out.bins[retained_index[cell_of[i]]].event_frequency;
  }
  return out;
}

}  // namespace

BinnedForecasts bin_fixed(const BinaryForecastSeries& series,
                          std::span<const double> thresholds) {
  check_thresholds(thresholds);
  return bin_by_thresholds(series, thresholds, BinningMethod::kFixed);
}

BinnedForecasts bin_quantile(const BinaryForecastSeries& series, std::size_t bin_count) {
  if (bin_count < 1 || bin_count > series.size()) {
    throw Error(ErrorCode::kBadBinCount,
                fmt::format("bin count {} outside [1, {}]", bin_count, series.size()));
  }
  std::vector<double> sorted(series.forecasts().begin(), series.forecasts().end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> breaks;
  for (std::size_t k = 1; k < bin_count; ++k) {
    const double q = stats::quantile_sorted(
        sorted, static_cast<double>(k) / static_cast<double>(bin_count));
    if (q <= 0.0 || q >= 1.0) continue;
    if (!breaks.empty() && q <= breaks.back()) continue;
    breaks.push_back(q);
  }
  return bin_by_thresholds(series, breaks, BinningMethod::kQuantile);
}

std::vector<double> equal_width_thresholds(std::size_t bin_count) {
  if (bin_count < 1) throw Error(ErrorCode::kBadBinCount, "bin count must be at least 1");
  std::vector<double> t;
  for (std::size_t k = 1; k < bin_count; ++k) {
    t.push_back(static_cast<double>(k) / static_cast<double>(bin_count));
  }
  return t;
}

std::optional<Preset> parse_preset(std::string_view name) {
  if (name == "hwin10") return Preset::kHomeWin10;
  if (name == "draw5") return Preset::kDraw5;
  if (name == "awin8") return Preset::kAwayWin8;
  return std::nullopt;
}

std::vector<double> preset_thresholds(Preset preset) {
  switch (preset) {
    case Preset::kHomeWin10: return equal_width_thresholds(10);
    case Preset::kDraw5: return {0.10, 0.15, 0.20, 0.25, 0.35};
    case Preset::kAwayWin8: {
      // seven equal cells up to 0.7, then [0.7, 1]
      std::vector<double> t;
      for (int k = 1; k <= 7; ++k) t.push_back(k / 10.0);
      return t;
    }
  }
  return {};
}

IsotonicRegression::IsotonicRegression(std::span<const double> forecasts)
    : group_of_(forecasts.size()) {
  std::vector<std::size_t> order(forecasts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return forecasts[a] < forecasts[b];
  });
  for (std::size_t i : order) {
    if (distinct_.empty() || forecasts[i] != distinct_.back()) {
      distinct_.push_back(forecasts[i]);
      group_weight_.push_back(0.0);
    }
    group_of_[i] = distinct_.size() - 1;
    group_weight_.back() += 1.0;
  }
}

std::vector<IsotonicRegression::Block> IsotonicRegression::fit(
    std::span<const double> targets) const {
  std::vector<double> group_sum(distinct_.size(), 0.0);
  for (std::size_t i = 0; i < targets.size(); ++i) group_sum[group_of_[i]] += targets[i];

  std::vector<Block> stack;
  stack.reserve(distinct_.size());
  for (std::size_t g = 0; g < distinct_.size(); ++g) {
    Block block{g, g + 1, group_sum[g], group_weight_[g]};
    // Merging on equality keeps block values strictly increasing.
    while (!stack.empty() &&
           stack.back().target_sum * block.weight >= block.target_sum * stack.back().weight) {
      block.first_group = stack.back().first_group;
      block.target_sum += stack.back().target_sum;
      block.weight += stack.back().weight;
      stack.pop_back();
    }
    stack.push_back(block);
  }
  return stack;
}

std::vector<double> IsotonicRegression::fitted_values(const std::vector<Block>& blocks) const {
  std::vector<double> group_value(distinct_.size());
  for (const Block& b : blocks) {
    const double v = b.value();
    for (std::size_t g = b.first_group; g < b.end_group; ++g) group_value[g] = v;
  }
  std::vector<double> out(group_of_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = group_value[group_of_[i]];
  return out;
}

double IsotonicRegression::evaluate(const std::vector<Block>& blocks, double t) const {
  const auto pos = std::upper_bound(distinct_.begin(), distinct_.end(), t);
  const std::size_t group =
      pos == distinct_.begin() ? 0 : static_cast<std::size_t>(pos - distinct_.begin()) - 1;
  const auto block = std::upper_bound(
      blocks.begin(), blocks.end(), group,
      [](std::size_t g, const Block& b) { return g < b.end_group; });
  return block->value();
}

BinnedForecasts pav_calibrate(const BinaryForecastSeries& series) {
  const IsotonicRegression iso(series.forecasts());
  std::vector<double> targets(series.outcomes().begin(), series.outcomes().end());
  const auto blocks = iso.fit(targets);
  const auto distinct = iso.distinct_forecasts();

  std::vector<stats::CompensatedSum> p_sum(blocks.size());
  std::vector<std::size_t> block_of_group(distinct.size());
  for (std::size_t d = 0; d < blocks.size(); ++d) {
    for (std::size_t g = blocks[d].first_group; g < blocks[d].end_group; ++g) {
      block_of_group[g] = d;
    }
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    p_sum[block_of_group[iso.group_of(i)]].add(series.forecast(i));
  }

  BinnedForecasts out;
  out.method = BinningMethod::kPav;
  for (std::size_t d = 0; d < blocks.size(); ++d) {
    Bin bin;
    bin.lower = d == 0 ? 0.0 : distinct[blocks[d].first_group];
    bin.upper = d + 1 == blocks.size() ? 1.0 : distinct[blocks[d + 1].first_group];
    bin.count = static_cast<std::size_t>(blocks[d].weight);
    bin.mean_forecast = p_sum[d].value() / blocks[d].weight;
    bin.event_frequency = blocks[d].value();
    out.bins.push_back(bin);
  }
  out.recalibrated = iso.fitted_values(blocks);
  return out;
}

}  // namespace fverify::binning
