#include "fverify/ingest.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <unordered_set>

#include <fmt/format.h>

namespace fverify::ingest {

std::array<double, 3> odds_to_probabilities(const OddsTriple& odds) {
  const std::array<double, 3> raw = {odds.home, odds.draw, odds.away};
  for (double o : raw) {
    if (!std::isfinite(o) || o <= 1.0) {
      throw Error(ErrorCode::kOddsNotAboveOne,
                  fmt::format("decimal odd {} must exceed 1", o));
    }
  }
  const double inv_home = 1.0 / raw[0];
  const double inv_draw = 1.0 / raw[1];
  const double inv_away = 1.0 / raw[2];
  const double total = inv_home + inv_draw + inv_away;
  const double p_home = inv_home / total;
  const double p_draw = inv_draw / total;
  return {p_home, p_draw, 1.0 - p_home - p_draw};
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

struct Line {
  std::size_t number;
  std::string_view text;
};

// Splits into lines, dropping blank ones but keeping 1-based numbering.
std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    std::string_view line = trim(text.substr(start, end - start));
    if (number == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (!line.empty()) lines.push_back({number, line});
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

class Table {
 public:
  Table(std::string_view text, std::span<const std::string_view> required) {
    lines_ = split_lines(text);
    if (lines_.empty()) {
      throw Error(ErrorCode::kMissingColumn, "input has no header line", 1);
    }
    const auto header = split_fields(lines_.front().text);
    for (std::string_view name : required) {
      std::optional<std::size_t> index;
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
          index = i;
          break;
        }
      }
      if (!index) {
        throw Error(ErrorCode::kMissingColumn,
                    fmt::format("header lacks column '{}'", name),
                    lines_.front().number);
      }
      columns_.push_back(*index);
    }
  }

  std::span<const Line> records() const {
    return std::span<const Line>(lines_).subspan(1);
  }

  // Returns the required columns of a record, in the order requested.
  std::vector<std::string_view> fields(const Line& line) const {
    const auto all = split_fields(line.text);
    std::vector<std::string_view> out;
    for (std::size_t c : columns_) {
      if (c >= all.size()) {
        throw Error(ErrorCode::kMissingColumn,
                    fmt::format("record has {} fields, expected at least {}", all.size(),
                                c + 1),
                    line.number);
      }
      out.push_back(all[c]);
    }
    return out;
  }

 private:
  std::vector<Line> lines_;
  std::vector<std::size_t> columns_;
};

double parse_number(std::string_view field, ErrorCode code, std::size_t line) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw Error(code, fmt::format("'{}' is not a number", field), line);
  }
  return value;
}

Category parse_outcome(std::string_view field, std::size_t line) {
  const auto category = parse_category(field);
  if (!category) {
    throw Error(ErrorCode::kBadOutcomeLabel,
                fmt::format("outcome '{}' is not one of H, D, A", field), line);
  }
  return *category;
}

template <typename RowProbs>
ParsedForecasts parse_multiclass(std::string_view text,
                                 std::span<const std::string_view> columns,
                                 RowProbs&& row_probs) {
  const Table table(text, columns);
  std::vector<std::string> warnings;
  std::vector<MulticlassRow> rows;
  std::unordered_set<std::string> seen;
  for (const Line& line : table.records()) {
    const auto f = table.fields(line);
    MulticlassRow row;
    row.match_id = std::string(f[0]);
    try {
      row.probs = row_probs(f, line.number);
      normalize_probability_row(row.probs);
    } catch (const Error& e) {
      if (e.line()) throw;
      throw Error(e.code(), e.detail(), line.number);
    }
    row.outcome = parse_outcome(f[4], line.number);
    if (!seen.insert(row.match_id).second) {
      warnings.push_back(fmt::format("line {}: DuplicateMatchId: '{}'", line.number,
                                            row.match_id));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw Error(ErrorCode::kEmptySeries, "no data rows after header");
  }
  return {MulticlassForecastSeries::validate(std::move(rows)), std::move(warnings)};
}

constexpr std::string_view kForecastColumns[] = {"match_id", "p_home", "p_draw", "p_away",
                                                 "outcome"};
constexpr std::string_view kOddsColumns[] = {"match_id", "odds_home", "odds_draw",
                                             "odds_away", "outcome"};
constexpr std::string_view kBinaryColumns[] = {"p", "x"};

}  // namespace

ParsedForecasts parse_forecast_csv(std::string_view text) {
  return parse_multiclass(text, kForecastColumns,
                          [](const std::vector<std::string_view>& f, std::size_t line) {
                            return std::array<double, 3>{
                                parse_number(f[1], ErrorCode::kBadProbability, line),
                                parse_number(f[2], ErrorCode::kBadProbability, line),
                                parse_number(f[3], ErrorCode::kBadProbability, line)};
                          });
}

ParsedForecasts parse_odds_csv(std::string_view text) {
  return parse_multiclass(text, kOddsColumns,
                          [](const std::vector<std::string_view>& f, std::size_t line) {
                            const OddsTriple odds{
                                parse_number(f[1], ErrorCode::kBadNumber, line),
                                parse_number(f[2], ErrorCode::kBadNumber, line),
                                parse_number(f[3], ErrorCode::kBadNumber, line)};
                            return odds_to_probabilities(odds);
                          });
}

BinaryForecastSeries parse_binary_csv(std::string_view text) {
  const Table table(text, kBinaryColumns);
  std::vector<double> p;
  std::vector<double> x;
  for (const Line& line : table.records()) {
    const auto f = table.fields(line);
    p.push_back(parse_number(f[0], ErrorCode::kOutOfRangeProbability, line.number));
    x.push_back(parse_number(f[1], ErrorCode::kNonBinaryOutcome, line.number));
    if (x.back() != 0.0 && x.back() != 1.0) {
      throw Error(ErrorCode::kNonBinaryOutcome, fmt::format("outcome '{}' is not 0 or 1", f[1]),
                  line.number);
    }
    if (p.back() < -kProbabilityClampTolerance || p.back() > 1.0 + kProbabilityClampTolerance) {
      throw Error(ErrorCode::kOutOfRangeProbability,
                  fmt::format("forecast '{}' outside [0,1]", f[0]), line.number);
    }
  }
  return BinaryForecastSeries::validate(std::span<const double>(p), std::span<const double>(x));
}

CsvSchema detect_schema(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) return CsvSchema::kUnknown;
  const auto header = split_fields(lines.front().text);
  auto has_all = [&](std::span<const std::string_view> names) {
    for (std::string_view name : names) {
      bool found = false;
      for (std::string_view h : header) found = found || h == name;
      if (!found) return false;
    }
    return true;
  };
  if (has_all(kForecastColumns)) return CsvSchema::kForecast;
  if (has_all(kOddsColumns)) return CsvSchema::kOdds;
  if (has_all(kBinaryColumns)) return CsvSchema::kBinary;
  return CsvSchema::kUnknown;
}

BinaryForecastSeries one_vs_all(const MulticlassForecastSeries& series, Category category) {
  const auto j = static_cast<std::size_t>(category);
  std::vector<double> p;
  std::vector<int> x;
  p.reserve(series.size());
  x.reserve(series.size());
  for (const auto& row : series.rows()) {
    p.push_back(row.probs[j]);
    x.push_back(row.outcome == category ? 1 : 0);
  }
  return BinaryForecastSeries::validate(std::span<const double>(p), std::span<const int>(x));
}

namespace {

// Rounds a row to millionths. Plain rounding can miss 1 by up to 1.5e-6,
// beyond the reader's tolerance; such rows move the entry with the largest
// rounding error one unit toward a total of 1.
std::array<long long, 3> to_micro_units(const std::array<double, 3>& probs) {
  std::array<long long, 3> units{};
  std::array<double, 3> error{};
  long long total = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    units[k] = std::llround(probs[k] * 1e6);
    error[k] = static_cast<double>(units[k]) - probs[k] * 1e6;
    total += units[k];
  }
  while (std::abs(total - 1000000) > 1) {
    const long long step = total > 1000000 ? -1 : 1;
    std::size_t pick = 0;
    for (std::size_t k = 1; k < 3; ++k) {
      if (step * error[k] < step * error[pick]) pick = k;
    }
    units[pick] += step;
    error[pick] += static_cast<double>(step);
    total += step;
  }
  return units;
}

}  // namespace

std::string write_forecast_csv(const MulticlassForecastSeries& series) {
  std::string out = "match_id,p_home,p_draw,p_away,outcome\n";
  for (const auto& row : series.rows()) {
    const auto u = to_micro_units(row.probs);
    out += fmt::format("{},{}.{:06d},{}.{:06d},{}.{:06d},{}\n", row.match_id, u[0] / 1000000,
                       u[0] % 1000000, u[1] / 1000000, u[1] % 1000000, u[2] / 1000000,
                       u[2] % 1000000, category_label(row.outcome));
  }
  return out;
}

std::string write_binary_csv(const BinaryForecastSeries& series) {
  std::string out = "p,x\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += fmt::format("{},{}\n", series.forecast(i), series.outcome(i));
  }
  return out;
}

}  // namespace fverify::ingest
