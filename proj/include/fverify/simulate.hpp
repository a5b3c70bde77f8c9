#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "fverify/domain.hpp"

namespace fverify::simulate {

struct UniformLaw {
  double lo = 0.0;
  double hi = 1.0;
};

struct BetaLaw {
  double a = 2.0;
  double b = 2.0;
};

using ForecastLaw = std::variant<UniformLaw, BetaLaw>;

// "uniform:lo,hi" or "beta:a,b". Throws kBadLaw.
ForecastLaw parse_law(std::string_view text);
std::string to_string(const ForecastLaw& law);

struct GeneratorConfig {
  std::size_t n = 500;
  double alpha = 0.0;
  double beta = 1.0;
  ForecastLaw law = BetaLaw{};
  std::uint64_t seed = 0;
  // Random stream within the seed; replicate batches use one stream each.
  std::uint64_t stream = 0;
};

// Forecasts drawn from the law; outcome i is Bernoulli with success
// probability logistic(alpha + beta * logit(p_i)). Deterministic in
// (config, seed, stream).
BinaryForecastSeries generate(const GeneratorConfig& config);

}  // namespace fverify::simulate
