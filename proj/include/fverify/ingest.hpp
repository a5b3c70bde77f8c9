#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "fverify/domain.hpp"

namespace fverify::ingest {

// Decimal odds for home win, draw and away win. Each must exceed 1.
struct OddsTriple {
  double home = 0.0;
  double draw = 0.0;
  double away = 0.0;
};

// Normalized inverse odds. The away component is the complement of the other
// two so the row sums to exactly 1.
std::array<double, 3> odds_to_probabilities(const OddsTriple& odds);

struct ParsedForecasts {
  MulticlassForecastSeries series;
  // Non-fatal findings such as repeated match ids.
  std::vector<std::string> warnings;
};

// Header: match_id,p_home,p_draw,p_away,outcome (extra columns ignored).
ParsedForecasts parse_forecast_csv(std::string_view text);
// Header: match_id,odds_home,odds_draw,odds_away,outcome.
ParsedForecasts parse_odds_csv(std::string_view text);
// Header: p,x.
BinaryForecastSeries parse_binary_csv(std::string_view text);

enum class CsvSchema { kForecast, kOdds, kBinary, kUnknown };

// Inspects the header line only.
CsvSchema detect_schema(std::string_view text);

BinaryForecastSeries one_vs_all(const MulticlassForecastSeries& series, Category category);

// Forecast CSV with six-decimal probabilities.
std::string write_forecast_csv(const MulticlassForecastSeries& series);
// p,x CSV with round-trip precision.
std::string write_binary_csv(const BinaryForecastSeries& series);

}  // namespace fverify::ingest
