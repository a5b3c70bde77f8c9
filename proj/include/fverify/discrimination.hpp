#pragma once

#include <cstddef>

#include "fverify/domain.hpp"
#include "fverify/inference.hpp"
#include "fverify/stats.hpp"

namespace fverify::discrimination {

using inference::TestResult;

struct DiscriminationSummary {
  std::size_t n0 = 0;
  std::size_t n1 = 0;
  double m0 = 0.0;  // mean forecast when the event did not occur
  double m1 = 0.0;  // mean forecast when it did
  double diff = 0.0;
  TestResult wilcoxon;
  TestResult ks;
  double c_statistic = 0.5;
  stats::FiveNumberSummary class0;
  stats::FiveNumberSummary class1;
};

// All fields populated; throws kDegenerateClass when a class is empty and
// kZeroVariance when every forecast is tied.
DiscriminationSummary discrimination_summary(const BinaryForecastSeries& series);

// Rank-sum of class-1 forecasts with midranks; normal approximation with
// tie-corrected variance, no continuity correction; one-sided upper p.
TestResult wilcoxon_test(const BinaryForecastSeries& series);

// Exact one-sided P(W >= observed) by enumerating every assignment of the
// pooled midranks to class 1. Limited to N <= kExactWilcoxonMaxN.
inline constexpr std::size_t kExactWilcoxonMaxN = 12;
TestResult wilcoxon_exact_test(const BinaryForecastSeries& series);

// D = sup |F0 - F1| with asymptotic Kolmogorov p-value at n0 n1 / (n0 + n1).
TestResult ks_test(const BinaryForecastSeries& series);

// Probability that a class-1 forecast exceeds a class-0 forecast, ties 1/2.
double c_statistic(const BinaryForecastSeries& series);

}  // namespace fverify::discrimination
