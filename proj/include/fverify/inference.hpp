#pragma once

#include <optional>
#include <string_view>
#include <utility>

#include "fverify/domain.hpp"

namespace fverify::inference {

enum class Sidedness { kTwoSided, kOneSidedUpper };

struct TestResult {
  double statistic = 0.0;
  std::optional<double> df;  // set for chi-square referenced statistics
  double p_value = 1.0;
  Sidedness sidedness = Sidedness::kTwoSided;
};

// Spiegelhalter's test of the Brier score under the calibration null.
struct SpiegelhalterResult {
  double z = 0.0;
  TestResult test;  // statistic = z^2 against chi-square(1)
};

SpiegelhalterResult spiegelhalter_test(const BinaryForecastSeries& series);

// Forecasts are clamped to [eps, 1 - eps] before the logit.
inline constexpr double kLogitEpsilon = 1e-6;
inline constexpr double kSeparationPredictorLimit = 30.0;
inline constexpr int kMaxIterations = 50;
inline constexpr double kDevianceTolerance = 1e-10;

// logit Pr(X = 1) = alpha + beta * logit(p), fitted by maximum likelihood.
struct CalibrationFit {
  double alpha = 0.0;
  double beta = 1.0;
  double se_alpha = 0.0;
  double se_beta = 0.0;
  double deviance_null = 0.0;    // D0 at alpha = 0, beta = 1
  double deviance_fitted = 0.0;  // D1 at the estimates
  bool converged = false;
  int iterations = 0;
  std::size_t n = 0;
  // Set when the outcomes are separable by the forecast; the estimates are
  // then NaN and separation_direction holds the sign toward which beta diverges.
  bool separation = false;
  int separation_direction = 0;
};

CalibrationFit fit_cox_calibration(const BinaryForecastSeries& series);

// ((estimate - null) / se)^2 against chi-square(1).
TestResult wald_test(double estimate, double se, double null_value);
// Wald tests of alpha = 0 and beta = 1. Throws kNotConverged.
std::pair<TestResult, TestResult> wald_tests(const CalibrationFit& fit);

// D0 - D1 against chi-square(2).
TestResult deviance_test(double deviance_null, double deviance_fitted);
TestResult deviance_test(const CalibrationFit& fit);

struct IgnoranceLikelihoodRatio {
  TestResult test;
  bool floored = false;  // raw statistic was negative (numerical noise)
  double raw_statistic = 0.0;
};

// 2N [mean ignorance of p - mean ignorance of the Cox-recalibrated forecasts].
IgnoranceLikelihoodRatio ignorance_lr_test(const BinaryForecastSeries& series,
                                           const CalibrationFit& fit);

// Reliability-diagram shapes implied by the sign pattern of (alpha, beta).
enum class ReliabilityProfile {
  kCalibrated,
  kUnderForecasting,  // alpha > 0, beta = 1: concave
  kOverForecasting,   // alpha < 0, beta = 1: convex
  kSigmoid,           // alpha = 0, beta > 1
  kInverseSigmoid,    // alpha = 0, beta < 1
  kMixed,             // both parameters depart
};

std::string_view to_string(ReliabilityProfile profile);

// Heuristic: "departs" means the Wald test rejects at the given level.
ReliabilityProfile classify_profile(const CalibrationFit& fit, double level = 0.05);

}  // namespace fverify::inference
