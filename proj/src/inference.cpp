#include "fverify/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "fverify/scoring.hpp"
#include "fverify/stats.hpp"

namespace fverify::inference {

SpiegelhalterResult spiegelhalter_test(const BinaryForecastSeries& series) {
  stats::CompensatedSum num;
  stats::CompensatedSum var;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double p = series.forecast(i);
    const double w = 1.0 - 2.0 * p;
    num.add((series.outcome(i) - p) * w);
    var.add(w * w * p * (1.0 - p));
  }
  if (!(var.value() > 0.0)) {
    throw Error(ErrorCode::kDegenerateVariance,
                "null variance is zero (forecasts all in {0, 0.5, 1})");
  }
  SpiegelhalterResult r;
  r.z = num.value() / std::sqrt(var.value());
  r.test.statistic = r.z * r.z;
  r.test.df = 1.0;
  r.test.p_value = stats::chi_square_sf(r.test.statistic, 1.0);
  return r;
}

namespace {

double softplus(double eta) {
  return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

double deviance(std::span<const double> l, std::span<const int> x, double a, double b) {
  stats::CompensatedSum ll;
  for (std::size_t i = 0; i < l.size(); ++i) {
    const double eta = a + b * l[i];
    ll.add(x[i] * eta - softplus(eta));
  }
  return -2.0 * ll.value();
}

struct Information {
  double h00 = 0.0, h01 = 0.0, h11 = 0.0;
  double g0 = 0.0, g1 = 0.0;
  double max_abs_eta = 0.0;
  double det() const { return h00 * h11 - h01 * h01; }
};

Information information(std::span<const double> l, std::span<const int> x, double a,
                        double b) {
  Information info;
  for (std::size_t i = 0; i < l.size(); ++i) {
    const double eta = a + b * l[i];
    const double mu = stats::logistic(eta);
    const double w = mu * (1.0 - mu);
    const double r = x[i] - mu;
    info.g0 += r;
    info.g1 += r * l[i];
    info.h00 += w;
    info.h01 += w * l[i];
    info.h11 += w * l[i] * l[i];
    info.max_abs_eta = std::max(info.max_abs_eta, std::abs(eta));
  }
  return info;
}

}  // namespace

CalibrationFit fit_cox_calibration(const BinaryForecastSeries& series) {
  const std::size_t n = series.size();
  std::vector<double> l(n);
  for (std::size_t i = 0; i < n; ++i) {
    l[i] = stats::logit(std::clamp(series.forecast(i), kLogitEpsilon, 1.0 - kLogitEpsilon));
  }
  const auto x = series.outcomes();
  if (series.event_count() == 0 || series.event_count() == n) {
    throw Error(ErrorCode::kDegenerateInput, "outcomes are all equal");
  }
  const auto [lo, hi] = std::minmax_element(l.begin(), l.end());
  if (*lo == *hi) throw Error(ErrorCode::kDegenerateInput, "forecasts are all equal");

  CalibrationFit fit;
  fit.n = n;
  fit.deviance_null = deviance(l, x, 0.0, 1.0);

  // With a single covariate the MLE is infinite exactly when a threshold on
  // logit(p) splits the classes (complete or quasi-complete separation).
  double max0 = -std::numeric_limits<double>::infinity(), min0 = -max0;
  double max1 = max0, min1 = min0;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] == 1) {
      max1 = std::max(max1, l[i]);
      min1 = std::min(min1, l[i]);
    } else {
      max0 = std::max(max0, l[i]);
      min0 = std::min(min0, l[i]);
    }
  }
  auto declare_separation = [&](int direction) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    fit.separation = true;
    fit.separation_direction = direction;
    fit.converged = false;
    fit.alpha = fit.beta = fit.se_alpha = fit.se_beta = nan;
    fit.deviance_fitted = nan;
    return fit;
  };
  if (max0 <= min1) return declare_separation(+1);
  if (max1 <= min0) return declare_separation(-1);

  double a = 0.0;
  double b = 1.0;
  double dev = fit.deviance_null;
  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    fit.iterations = iter;
    const Information info = information(l, x, a, b);
    const double det = info.det();
    if (!(det > 0.0)) break;
    const double da = (info.h11 * info.g0 - info.h01 * info.g1) / det;
    const double db = (info.h00 * info.g1 - info.h01 * info.g0) / det;
    double step = 1.0;
    double next_dev = deviance(l, x, a + da, b + db);
    for (int halving = 0; halving < 30 && !(next_dev <= dev); ++halving) {
      step *= 0.5;
      next_dev = deviance(l, x, a + step * da, b + step * db);
    }
    a += step * da;
    b += step * db;
    const double change = std::abs(dev - next_dev);
    dev = next_dev;
    const Information at = information(l, x, a, b);
    if (at.max_abs_eta > kSeparationPredictorLimit) {
      return declare_separation(b >= 0.0 ? +1 : -1);
    }
    if (change < kDevianceTolerance) {
      fit.converged = true;
      break;
    }
  }

  const Information info = information(l, x, a, b);
  const double det = info.det();
  fit.alpha = a;
  fit.beta = b;
  fit.deviance_fitted = dev;
  fit.se_alpha = std::sqrt(info.h11 / det);
  fit.se_beta = std::sqrt(info.h00 / det);
  return fit;
}

TestResult wald_test(double estimate, double se, double null_value) {
  TestResult r;
  const double t = (estimate - null_value) / se;
  r.statistic = t * t;
  r.df = 1.0;
  r.p_value = stats::chi_square_sf(r.statistic, 1.0);
  return r;
}

namespace {

void require_converged(const CalibrationFit& fit) {
  if (!fit.converged) {
    throw Error(ErrorCode::kNotConverged,
                fit.separation ? "calibration fit hit separation" : "calibration fit did not converge");
  }
}

}  // namespace

std::pair<TestResult, TestResult> wald_tests(const CalibrationFit& fit) {
  require_converged(fit);
  return {wald_test(fit.alpha, fit.se_alpha, 0.0), wald_test(fit.beta, fit.se_beta, 1.0)};
}

TestResult deviance_test(double deviance_null, double deviance_fitted) {
  TestResult r;
  r.statistic = deviance_null - deviance_fitted;
  r.df = 2.0;
  r.p_value = r.statistic <= 0.0 ? 1.0 : std::exp(-r.statistic / 2.0);
  return r;
}

TestResult deviance_test(const CalibrationFit& fit) {
  require_converged(fit);
  return deviance_test(fit.deviance_null, fit.deviance_fitted);
}

IgnoranceLikelihoodRatio ignorance_lr_test(const BinaryForecastSeries& series,
                                           const CalibrationFit& fit) {
  require_converged(fit);
  stats::CompensatedSum raw;
  stats::CompensatedSum recalibrated;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double p = series.forecast(i);
    const double l = stats::logit(std::clamp(p, kLogitEpsilon, 1.0 - kLogitEpsilon));
    const double q = stats::logistic(fit.alpha + fit.beta * l);
    raw.add(scoring::ignorance(p, series.outcome(i)));
    recalibrated.add(scoring::ignorance(q, series.outcome(i)));
  }
  // 2N (mean_p - mean_q) = 2 (sum_p - sum_q)
  IgnoranceLikelihoodRatio out;
  out.raw_statistic = 2.0 * (raw.value() - recalibrated.value());
  out.floored = out.raw_statistic < 0.0;
  out.test.statistic = std::max(out.raw_statistic, 0.0);
  out.test.df = 2.0;
  out.test.p_value = stats::chi_square_sf(out.test.statistic, 2.0);
  return out;
}

std::string_view to_string(ReliabilityProfile profile) {
  switch (profile) {
    case ReliabilityProfile::kCalibrated: return "calibrated";
    case ReliabilityProfile::kUnderForecasting: return "under-forecasting (concave)";
    case ReliabilityProfile::kOverForecasting: return "over-forecasting (convex)";
    case ReliabilityProfile::kSigmoid: return "sigmoid";
    case ReliabilityProfile::kInverseSigmoid: return "inverse-sigmoid";
    case ReliabilityProfile::kMixed: return "mixed";
  }
  return "unknown";
}

ReliabilityProfile classify_profile(const CalibrationFit& fit, double level) {
  const auto [alpha_test, beta_test] = wald_tests(fit);
  const bool alpha_departs = alpha_test.p_value < level;
  const bool beta_departs = beta_test.p_value < level;
  if (alpha_departs && beta_departs) return ReliabilityProfile::kMixed;
  if (alpha_departs) {
    return fit.alpha > 0.0 ? ReliabilityProfile::kUnderForecasting
                           : ReliabilityProfile::kOverForecasting;
  }
  if (beta_departs) {
    return fit.beta > 1.0 ? ReliabilityProfile::kSigmoid : ReliabilityProfile::kInverseSigmoid;
  }
  return ReliabilityProfile::kCalibrated;
}

}  // namespace fverify::inference
