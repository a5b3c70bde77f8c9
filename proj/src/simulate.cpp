#include "fverify/simulate.hpp"

#include <charconv>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "fverify/random.hpp"
#include "fverify/stats.hpp"

namespace fverify::simulate {

namespace {

void check_law(const ForecastLaw& law) {
  if (const auto* u = std::get_if<UniformLaw>(&law)) {
    if (!(u->lo >= 0.0 && u->hi <= 1.0 && u->lo < u->hi)) {
      throw Error(ErrorCode::kBadLaw,
                  fmt::format("uniform({}, {}) must satisfy 0 <= lo < hi <= 1", u->lo, u->hi));
    }
  } else {
    const auto& b = std::get<BetaLaw>(law);
    if (!(b.a > 0.0 && b.b > 0.0 && std::isfinite(b.a) && std::isfinite(b.b))) {
      throw Error(ErrorCode::kBadLaw,
                  fmt::format("beta({}, {}) needs positive finite shapes", b.a, b.b));
    }
  }
}

double parse_param(std::string_view s, std::string_view whole) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kBadLaw, fmt::format("cannot parse law '{}'", whole));
  }
  return v;
}

}  // namespace

ForecastLaw parse_law(std::string_view text) {
  const std::size_t colon = text.find(':');
  const std::size_t comma = text.find(',', colon == std::string_view::npos ? 0 : colon);
  if (colon == std::string_view::npos || comma == std::string_view::npos) {
    throw Error(ErrorCode::kBadLaw,
                fmt::format("law '{}' is not of the form name:a,b", text));
  }
  const std::string_view name = text.substr(0, colon);
  const double first = parse_param(text.substr(colon + 1, comma - colon - 1), text);
  const double second = parse_param(text.substr(comma + 1), text);
  ForecastLaw law;
  if (name == "uniform") {
    law = UniformLaw{first, second};
  } else if (name == "beta") {
    law = BetaLaw{first, second};
  } else {
    throw Error(ErrorCode::kBadLaw, fmt::format("unknown law '{}'", name));
  }
  check_law(law);
  return law;
}

std::string to_string(const ForecastLaw& law) {
  if (const auto* u = std::get_if<UniformLaw>(&law)) {
    return fmt::format("uniform:{},{}", u->lo, u->hi);
  }
  const auto& b = std::get<BetaLaw>(law);
  return fmt::format("beta:{},{}", b.a, b.b);
}

BinaryForecastSeries generate(const GeneratorConfig& config) {
  if (config.n < 1) throw Error(ErrorCode::kEmptySeries, "n must be at least 1");
  check_law(config.law);
  random::Stream stream(config.seed, config.stream);
  std::vector<double> p(config.n);
  std::vector<int> x(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    if (const auto* u = std::get_if<UniformLaw>(&config.law)) {
      p[i] = u->lo + (u->hi - u->lo) * stream.uniform();
    } else {
      const auto& b = std::get<BetaLaw>(config.law);
      p[i] = stream.beta(b.a, b.b);
    }
    const double eta =
        config.beta == 0.0 ? config.alpha : config.alpha + config.beta * stats::logit(p[i]);
    x[i] = stream.bernoulli(stats::logistic(eta)) ? 1 : 0;
  }
  return BinaryForecastSeries::validate(std::span<const double>(p), std::span<const int>(x));
}

}  // namespace fverify::simulate
