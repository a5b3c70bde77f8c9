#include "fverify/discrimination.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

namespace fverify::discrimination {

namespace {

struct Classes {
  std::vector<double> zero;
  std::vector<double> one;
};

Classes split(const BinaryForecastSeries& series) {
  Classes c;
  for (std::size_t i = 0; i < series.size(); ++i) {
    (series.outcome(i) == 1 ? c.one : c.zero).push_back(series.forecast(i));
  }
  if (c.zero.empty() || c.one.empty()) {
    throw Error(ErrorCode::kDegenerateClass,
                fmt::format("need both outcome classes (n0 = {}, n1 = {})", c.zero.size(),
                            c.one.size()));
  }
  return c;
}

double class1_rank_sum(const BinaryForecastSeries& series, const std::vector<double>& ranks) {
  double w = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.outcome(i) == 1) w += ranks[i];
  }
  return w;
}

}  // namespace

TestResult wilcoxon_test(const BinaryForecastSeries& series) {
  const Classes c = split(series);
  const double n0 = static_cast<double>(c.zero.size());
  const double n1 = static_cast<double>(c.one.size());
  const double n = n0 + n1;
  const auto ranks = stats::midranks(series.forecasts());
  const double w = class1_rank_sum(series, ranks);

  // tie correction sum (t^3 - t) over groups of equal forecasts
  std::vector<double> sorted(series.forecasts().begin(), series.forecasts().end());
  std::sort(sorted.begin(), sorted.end());
  double ties = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    ties += t * t * t - t;
    i = j;
  }
  const double variance = n0 * n1 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
  if (!(variance > 0.0)) {
    throw Error(ErrorCode::kZeroVariance, "all forecasts are tied");
  }
  TestResult r;
  r.statistic = (w - n1 * (n + 1.0) / 2.0) / std::sqrt(variance);
  r.p_value = stats::normal_sf(r.statistic);
  r.sidedness = inference::Sidedness::kOneSidedUpper;
  return r;
}

TestResult wilcoxon_exact_test(const BinaryForecastSeries& series) {
  const Classes c = split(series);
  const std::size_t n = series.size();
  if (n > kExactWilcoxonMaxN) {
    throw Error(ErrorCode::kSampleTooLarge,
                fmt::format("exact enumeration limited to N <= {}", kExactWilcoxonMaxN));
  }
  const auto ranks = stats::midranks(series.forecasts());
  // midranks are multiples of 1/2; compare doubled sums as integers
  const auto observed = static_cast<long>(std::lround(2.0 * class1_rank_sum(series, ranks)));
  const std::size_t n1 = c.one.size();
  std::size_t total = 0;
  std::size_t at_least = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != n1) continue;
    long doubled = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) doubled += std::lround(2.0 * ranks[i]);
    }
    ++total;
    if (doubled >= observed) ++at_least;
  }
  TestResult r;
  r.statistic = static_cast<double>(observed) / 2.0;
  r.p_value = static_cast<double>(at_least) / static_cast<double>(total);
  r.sidedness = inference::Sidedness::kOneSidedUpper;
  return r;
}

TestResult ks_test(const BinaryForecastSeries& series) {
  Classes c = split(series);
  std::sort(c.zero.begin(), c.zero.end());
  std::sort(c.one.begin(), c.one.end());
  const double n0 = static_cast<double>(c.zero.size());
  const double n1 = static_cast<double>(c.one.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  // Step through the pooled sample, consuming all copies of each value.
  while (i < c.zero.size() || j < c.one.size()) {
    double t;
    if (j == c.one.size() || (i < c.zero.size() && c.zero[i] <= c.one[j])) {
      t = c.zero[i];
    } else {
      t = c.one[j];
    }
    while (i < c.zero.size() && c.zero[i] == t) ++i;
    while (j < c.one.size() && c.one[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n0 - static_cast<double>(j) / n1));
  }
  TestResult r;
  r.statistic = d;
  const double ne = n0 * n1 / (n0 + n1);
  r.p_value = stats::kolmogorov_sf(std::sqrt(ne) * d);
  return r;
}

double c_statistic(const BinaryForecastSeries& series) {
  const Classes c = split(series);
  const double n0 = static_cast<double>(c.zero.size());
  const double n1 = static_cast<double>(c.one.size());
  const auto ranks = stats::midranks(series.forecasts());
  const double u = class1_rank_sum(series, ranks) - n1 * (n1 + 1.0) / 2.0;
  return u / (n0 * n1);
}

DiscriminationSummary discrimination_summary(const BinaryForecastSeries& series) {
  const Classes c = split(series);
  DiscriminationSummary s;
  s.n0 = c.zero.size();
  s.n1 = c.one.size();
  s.m0 = stats::mean(c.zero);
  s.m1 = stats::mean(c.one);
  s.diff = s.m1 - s.m0;
  s.wilcoxon = wilcoxon_test(series);
  s.ks = ks_test(series);
  s.c_statistic = c_statistic(series);
  s.class0 = stats::five_number_summary(c.zero);
  s.class1 = stats::five_number_summary(c.one);
  return s;
}

}  // namespace fverify::discrimination
