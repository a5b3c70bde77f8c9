#include "fverify/domain.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

namespace fverify {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kOutOfRangeProbability: return "OutOfRangeProbability";
    case ErrorCode::kNonBinaryOutcome: return "NonBinaryOutcome";
    case ErrorCode::kEmptySeries: return "EmptySeries";
    case ErrorCode::kOddsNotAboveOne: return "OddsNotAboveOne";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kBadProbability: return "BadProbability";
    case ErrorCode::kBadOutcomeLabel: return "BadOutcomeLabel";
    case ErrorCode::kBadNumber: return "BadNumber";
    case ErrorCode::kNonAscendingThresholds: return "NonAscendingThresholds";
    case ErrorCode::kBadBinCount: return "BadBinCount";
    case ErrorCode::kSeriesMismatch: return "SeriesMismatch";
    case ErrorCode::kDegenerateUncertainty: return "DegenerateUncertainty";
    case ErrorCode::kDegenerateVariance: return "DegenerateVariance";
    case ErrorCode::kDegenerateClass: return "DegenerateClass";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kNotConverged: return "NotConverged";
    case ErrorCode::kBadLevel: return "BadLevel";
    case ErrorCode::kBadReps: return "BadReps";
    case ErrorCode::kBadLaw: return "BadLaw";
    case ErrorCode::kSampleTooLarge: return "SampleTooLarge";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> line)
    : std::runtime_error(line ? fmt::format("line {}: {}: {}", *line,
                                            to_string(code), message)
                              : fmt::format("{}: {}", to_string(code), message)),
      code_(code),
      detail_(message),
      line_(line) {}

namespace {

double checked_probability(double p, std::size_t index) {
  if (!std::isfinite(p)) {
    throw Error(ErrorCode::kOutOfRangeProbability,
                fmt::format("forecast {} is not finite", index));
  }
  if (p < 0.0) {
    if (p < -kProbabilityClampTolerance) {
      throw Error(ErrorCode::kOutOfRangeProbability,
                  fmt::format("forecast {} = {} is below 0", index, p));
    }
    return 0.0;
  }
  if (p > 1.0) {
    if (p > 1.0 + kProbabilityClampTolerance) {
      throw Error(ErrorCode::kOutOfRangeProbability,
                  fmt::format("forecast {} = {} is above 1", index, p));
    }
    return 1.0;
  }
  return p;
}

template <typename T>
BinaryForecastSeries make_series(std::span<const double> forecasts,
                                 std::span<const T> outcomes,
                                 BinaryForecastSeries (*ctor)(std::vector<double>,
                                                              std::vector<int>)) {
  if (forecasts.size() != outcomes.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                fmt::format("{} forecasts vs {} outcomes", forecasts.size(),
                            outcomes.size()));
  }
  if (forecasts.empty()) {
    throw Error(ErrorCode::kEmptySeries, "series has no observations");
  }
  std::vector<double> p(forecasts.size());
  std::vector<int> x(outcomes.size());
  for (std::size_t i = 0; i < forecasts.size(); ++i) {
    p[i] = checked_probability(forecasts[i], i);
    if (outcomes[i] == T{0}) {
      x[i] = 0;
    } else if (outcomes[i] == T{1}) {
      x[i] = 1;
    } else {
      throw Error(ErrorCode::kNonBinaryOutcome,
                  fmt::format("outcome {} is not 0 or 1", i));
    }
  }
  return ctor(std::move(p), std::move(x));
}

}  // namespace

BinaryForecastSeries::BinaryForecastSeries(std::vector<double> forecasts,
                                           std::vector<int> outcomes)
    : forecasts_(std::move(forecasts)), outcomes_(std::move(outcomes)) {
  events_ = static_cast<std::size_t>(std::count(outcomes_.begin(), outcomes_.end(), 1));
}

BinaryForecastSeries BinaryForecastSeries::validate(std::span<const double> forecasts,
                                                    std::span<const double> outcomes) {
  return make_series<double>(forecasts, outcomes, [](std::vector<double> p, std::vector<int> x) {
    return BinaryForecastSeries(std::move(p), std::move(x));
  });
}

BinaryForecastSeries BinaryForecastSeries::validate(std::span<const double> forecasts,
                                                    std::span<const int> outcomes) {
  return make_series<int>(forecasts, outcomes, [](std::vector<double> p, std::vector<int> x) {
    return BinaryForecastSeries(std::move(p), std::move(x));
  });
}

char category_label(Category c) {
  switch (c) {
    case Category::kHome: return 'H';
    case Category::kDraw: return 'D';
    case Category::kAway: return 'A';
  }
  return '?';
}

std::optional<Category> parse_category(std::string_view label) {
  if (label.size() != 1) return std::nullopt;
  switch (std::toupper(static_cast<unsigned char>(label[0]))) {
    case 'H': return Category::kHome;
    case 'D': return Category::kDraw;
    case 'A': return Category::kAway;
    default: return std::nullopt;
  }
}

void normalize_probability_row(std::array<double, 3>& probs) {
  double sum = 0.0;
  for (double& p : probs) {
    if (!std::isfinite(p) || p < -kProbabilityClampTolerance ||
        p > 1.0 + kProbabilityClampTolerance) {
      throw Error(ErrorCode::kBadProbability,
                  fmt::format("probability {} outside [0,1]", p));
    }
    p = std::clamp(p, 0.0, 1.0);
    sum += p;
  }
  // The slack absorbs binary representation error of decimal input, so a row
  // written as 0.999999 still counts as within 1e-6.
  if (std::abs(sum - 1.0) > kRowSumTolerance * (1.0 + 1e-9)) {
    throw Error(ErrorCode::kBadProbability,
                fmt::format("probabilities sum to {} (tolerance {})", sum,
                            kRowSumTolerance));
  }
  if (sum != 1.0) {
    for (double& p : probs) p /= sum;
  }
}

MulticlassForecastSeries MulticlassForecastSeries::validate(std::vector<MulticlassRow> rows) {
  if (rows.empty()) {
    throw Error(ErrorCode::kEmptySeries, "multiclass series has no rows");
  }
  for (auto& row : rows) normalize_probability_row(row.probs);
  return MulticlassForecastSeries(std::move(rows));
}

std::string_view to_string(BinningMethod m) {
  switch (m) {
    case BinningMethod::kFixed: return "fixed";
    case BinningMethod::kQuantile: return "quantile";
    case BinningMethod::kPav: return "pav";
  }
  return "unknown";
}

std::string_view to_string(DecompositionMethod m) {
  switch (m) {
    case DecompositionMethod::kCalibrationRefinement: return "CR";
    case DecompositionMethod::kLikelihoodBase: return "LB";
    case DecompositionMethod::kYates: return "YATES";
  }
  return "unknown";
}

namespace {

double lookup(const std::vector<std::pair<std::string, double>>& items,
              std::string_view name) {
  for (const auto& [key, value] : items) {
    if (key == name) return value;
  }
  throw std::out_of_range(fmt::format("no component named {}", name));
}

}  // namespace

double ScoreDecomposition::component(std::string_view name) const {
  return lookup(components, name);
}

double ScoreDecomposition::extra(std::string_view name) const {
  return lookup(extras, name);
}

bool ScoreDecomposition::has_flag(ErrorCode code) const {
  return std::find(flags.begin(), flags.end(), code) != flags.end();
}

double ScoreDecomposition::reconstructed_score() const {
  switch (method) {
    case DecompositionMethod::kCalibrationRefinement:
      return component("REL") - component("RES") + component("UNC");
    case DecompositionMethod::kLikelihoodBase:
      return component("REF") - component("DIS") + component("CB2");
    case DecompositionMethod::kYates: {
      double total = 0.0;
      for (const auto& [name, value] : components) total += value;
      return total;
    }
  }
  return 0.0;
}

std::optional<double> ScoreDecomposition::uncertainty() const {
  for (const auto& [key, value] : components) {
    if (key == "UNC") return value;
  }
  for (const auto& [key, value] : extras) {
    if (key == "UNC") return value;
  }
  return std::nullopt;
}

}  // namespace fverify
