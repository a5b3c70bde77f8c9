#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fverify {

enum class ErrorCode {
  kLengthMismatch,
  kOutOfRangeProbability,
  kNonBinaryOutcome,
  kEmptySeries,
  kOddsNotAboveOne,
  kMissingColumn,
  kBadProbability,
  kBadOutcomeLabel,
  kBadNumber,
  kNonAscendingThresholds,
  kBadBinCount,
  kSeriesMismatch,
  kDegenerateUncertainty,
  kDegenerateVariance,
  kDegenerateClass,
  kDegenerateInput,
  kZeroVariance,
  kNotConverged,
  kBadLevel,
  kBadReps,
  kBadLaw,
  kSampleTooLarge,
  kIoError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a machine-readable code. Parsing
// errors additionally carry the 1-based line number of the offending record.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }
  // Message without the code and line prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
  std::optional<std::size_t> line_;
};

inline constexpr double kProbabilityClampTolerance = 1e-9;
inline constexpr double kRowSumTolerance = 1e-6;

// Paired forecast probabilities and binary outcomes. Instances only come out
// of validate(), so every accessor can rely on the invariants.
class BinaryForecastSeries {
 public:
  static BinaryForecastSeries validate(std::span<const double> forecasts,
                                       std::span<const double> outcomes);
  static BinaryForecastSeries validate(std::span<const double> forecasts,
                                       std::span<const int> outcomes);

  std::span<const double> forecasts() const noexcept { return forecasts_; }
  std::span<const int> outcomes() const noexcept { return outcomes_; }
  std::size_t size() const noexcept { return forecasts_.size(); }
  double forecast(std::size_t i) const { return forecasts_[i]; }
  int outcome(std::size_t i) const { return outcomes_[i]; }

  std::size_t event_count() const noexcept { return events_; }
  double base_rate() const noexcept {
    return static_cast<double>(events_) / static_cast<double>(size());
  }

 private:
  BinaryForecastSeries(std::vector<double> forecasts, std::vector<int> outcomes);

  std::vector<double> forecasts_;
  std::vector<int> outcomes_;
  std::size_t events_ = 0;
};

// Categories are ordered H < D < A for ranked scores.
enum class Category { kHome = 0, kDraw = 1, kAway = 2 };

inline constexpr std::array<Category, 3> kAllCategories = {
    Category::kHome, Category::kDraw, Category::kAway};

char category_label(Category c);
std::optional<Category> parse_category(std::string_view label);

struct MulticlassRow {
  std::string match_id;
  std::array<double, 3> probs{};
  Category outcome = Category::kHome;
};

class MulticlassForecastSeries {
 public:
  // Rows whose probabilities sum to 1 within kRowSumTolerance are
  // renormalized; anything further off is rejected with kBadProbability.
  static MulticlassForecastSeries validate(std::vector<MulticlassRow> rows);

  std::span<const MulticlassRow> rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  const MulticlassRow& operator[](std::size_t i) const { return rows_[i]; }

 private:
  explicit MulticlassForecastSeries(std::vector<MulticlassRow> rows)
      : rows_(std::move(rows)) {}

  std::vector<MulticlassRow> rows_;
};

// Normalizes a single probability row in place. Throws kBadProbability.
void normalize_probability_row(std::array<double, 3>& probs);

enum class BinningMethod { kFixed, kQuantile, kPav };

std::string_view to_string(BinningMethod m);

struct Bin {
  double lower = 0.0;
  double upper = 1.0;
  double mean_forecast = 0.0;
  double event_frequency = 0.0;
  std::size_t count = 0;
};

struct BinnedForecasts {
  std::vector<Bin> bins;
  // recalibrated[i] is the event frequency of the bin holding observation i.
  std::vector<double> recalibrated;
  BinningMethod method = BinningMethod::kFixed;

  std::size_t size() const noexcept { return recalibrated.size(); }
};

enum class DecompositionMethod { kCalibrationRefinement, kLikelihoodBase, kYates };

std::string_view to_string(DecompositionMethod m);

struct ScoreDecomposition {
  DecompositionMethod method = DecompositionMethod::kCalibrationRefinement;
  // Ordered (name, value) pairs; names follow the usual verification
  // abbreviations (REL, RES, UNC / REF, DIS, CB2 / UNC, -2COV, VPB, VPW, RIL).
  std::vector<std::pair<std::string, double>> components;
  double mean_score = 0.0;
  std::optional<double> skill;
  // Auxiliary quantities that are not summands (COV, b, class means, ...).
  std::vector<std::pair<std::string, double>> extras;
  std::vector<ErrorCode> flags;

  double component(std::string_view name) const;
  double extra(std::string_view name) const;
  bool has_flag(ErrorCode code) const;
  // Recombines the components with the method's signs.
  double reconstructed_score() const;
  // The uncertainty term (UNC) when the method carries one.
  std::optional<double> uncertainty() const;
};

}  // namespace fverify
