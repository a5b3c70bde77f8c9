#pragma once

#include <array>
#include <span>

#include "fverify/domain.hpp"

namespace fverify::scoring {

inline constexpr double kIgnoranceEpsilon = 1e-12;

enum class RuleKind { kHalfBrier, kIgnorance, kZeroOne, kRankedProbability };

struct ScoringRule {
  RuleKind kind = RuleKind::kHalfBrier;
  double epsilon = kIgnoranceEpsilon;  // ignorance only
};

// (p - x)^2
double half_brier(double p, int x);
// -x log p - (1 - x) log(1 - p), natural log, p clamped to [eps, 1 - eps].
double ignorance(double p, int x, double epsilon = kIgnoranceEpsilon);
// 0 for a correct categorical call, 1 for a miss, 0.5 at p = 0.5.
double zero_one(double p, int x);
// Ranked probability score over H < D < A, normalized by J - 1.
double rps(const std::array<double, 3>& probs, Category outcome);

double score(const ScoringRule& rule, double p, int x);

// Empirical mean of a binary rule over the series. Not defined for RPS.
double mean_score(const BinaryForecastSeries& series, const ScoringRule& rule);
// Mean half-Brier of an arbitrary vector of forecasts against the outcomes of
// the series, used to score recalibrated and climatological vectors.
double mean_half_brier(std::span<const double> forecasts, std::span<const int> outcomes);
double mean_rps(const MulticlassForecastSeries& series);

}  // namespace fverify::scoring
