#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fverify::stats {

// Neumaier-compensated accumulator; result is independent of the magnitude
// ordering of summands up to the last ulp for the sizes used here.
class CompensatedSum {
 public:
  void add(double value) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double sum(std::span<const double> values);
double mean(std::span<const double> values);
// Population variance (divides by N).
double population_variance(std::span<const double> values);

// Hyndman-Fan type 7 quantile of an ascending-sorted sample.
double quantile_sorted(std::span<const double> sorted, double prob);

struct FiveNumberSummary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

FiveNumberSummary five_number_summary(std::vector<double> values);

// Upper tail of the standard normal, P(Z > z).
double normal_sf(double z);
// Upper tail of the chi-square distribution, P(X > s) with df degrees of freedom.
double chi_square_sf(double statistic, double df);
// Asymptotic Kolmogorov tail Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_sf(double lambda);

// Midranks (1-based) of values; ties receive the average of their positions.
std::vector<double> midranks(std::span<const double> values);

double logit(double p);
double logistic(double eta);

}  // namespace fverify::stats
