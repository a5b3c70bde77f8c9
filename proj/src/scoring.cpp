#include "fverify/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fverify/stats.hpp"

namespace fverify::scoring {

double half_brier(double p, int x) {
  const double d = p - static_cast<double>(x);
  return d * d;
}

double ignorance(double p, int x, double epsilon) {
  const double q = std::clamp(p, epsilon, 1.0 - epsilon);
  return x == 1 ? -std::log(q) : -std::log1p(-q);
}

double zero_one(double p, int x) {
  if (p == 0.5) return 0.5;
  const bool called_event = p > 0.5;
  return called_event == (x == 1) ? 0.0 : 1.0;
}

double rps(const std::array<double, 3>& probs, Category outcome) {
  const auto k = static_cast<std::size_t>(outcome);
  double cum_p = 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < probs.size(); ++j) {
    cum_p += probs[j];
    const double cum_x = j >= k ? 1.0 : 0.0;
    total += (cum_p - cum_x) * (cum_p - cum_x);
  }
  return total / static_cast<double>(probs.size() - 1);
}

double score(const ScoringRule& rule, double p, int x) {
  switch (rule.kind) {
    case RuleKind::kHalfBrier: return half_brier(p, x);
    case RuleKind::kIgnorance: return ignorance(p, x, rule.epsilon);
    case RuleKind::kZeroOne: return zero_one(p, x);
    case RuleKind::kRankedProbability: break;
  }
  throw std::invalid_argument("ranked probability score needs a probability vector");
}

double mean_score(const BinaryForecastSeries& series, const ScoringRule& rule) {
  stats::CompensatedSum acc;
  for (std::size_t i = 0; i < series.size(); ++i) {
    acc.add(score(rule, series.forecast(i), series.outcome(i)));
  }
  return acc.value() / static_cast<double>(series.size());
}

double mean_half_brier(std::span<const double> forecasts, std::span<const int> outcomes) {
  stats::CompensatedSum acc;
  for (std::size_t i = 0; i < forecasts.size(); ++i) {
    acc.add(half_brier(forecasts[i], outcomes[i]));
  }
  return acc.value() / static_cast<double>(forecasts.size());
}

double mean_rps(const MulticlassForecastSeries& series) {
  stats::CompensatedSum acc;
  for (const auto& row : series.rows()) acc.add(rps(row.probs, row.outcome));
  return acc.value() / static_cast<double>(series.size());
}

}  // namespace fverify::scoring
