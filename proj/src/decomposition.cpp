#include "fverify/decomposition.hpp"

#include <algorithm>
#include <vector>

#include <fmt/format.h>

#include "fverify/binning.hpp"
#include "fverify/ingest.hpp"
#include "fverify/scoring.hpp"
#include "fverify/stats.hpp"

namespace fverify::decomposition {

namespace {

// Population moments of the forecasts split by outcome class.
struct ClassMoments {
  double n = 0.0;
  double n0 = 0.0;
  double n1 = 0.0;
  double mean_p = 0.0;
  double mean_x = 0.0;
  double m0 = 0.0;  // E(P | X = 0)
  double m1 = 0.0;  // E(P | X = 1)
  double var0 = 0.0;
  double var1 = 0.0;
  double var_p = 0.0;
  double cov = 0.0;
  bool degenerate = false;

  double between() const {
    return (n0 / n) * (m0 - mean_p) * (m0 - mean_p) + (n1 / n) * (m1 - mean_p) * (m1 - mean_p);
  }
  double within() const { return (n0 / n) * var0 + (n1 / n) * var1; }
};

ClassMoments class_moments(const BinaryForecastSeries& series) {
  std::vector<double> class0;
  std::vector<double> class1;
  for (std::size_t i = 0; i < series.size(); ++i) {
    (series.outcome(i) == 1 ? class1 : class0).push_back(series.forecast(i));
  }
  ClassMoments m;
  m.n = static_cast<double>(series.size());
  m.n0 = static_cast<double>(class0.size());
  m.n1 = static_cast<double>(class1.size());
  m.mean_p = stats::mean(series.forecasts());
  m.mean_x = series.base_rate();
  m.m0 = stats::mean(class0);
  m.m1 = stats::mean(class1);
  m.var0 = stats::population_variance(class0);
  m.var1 = stats::population_variance(class1);
  m.var_p = stats::population_variance(series.forecasts());
  stats::CompensatedSum cov;
  for (std::size_t i = 0; i < series.size(); ++i) {
    cov.add((series.forecast(i) - m.mean_p) * (series.outcome(i) - m.mean_x));
  }
  m.cov = cov.value() / m.n;
  m.degenerate = class0.empty() || class1.empty();
  return m;
}

double climatological_score(const BinaryForecastSeries& series) {
  const std::vector<double> clim(series.size(), series.base_rate());
  return scoring::mean_half_brier(clim, series.outcomes());
}

}  // namespace

ScoreDecomposition cr_decompose(const BinaryForecastSeries& series,
                                const BinnedForecasts& binned) {
  if (binned.size() != series.size()) {
    throw Error(ErrorCode::kSeriesMismatch,
                fmt::format("binning covers {} observations, series has {}", binned.size(),
                            series.size()));
  }
  const double score_p = scoring::mean_half_brier(series.forecasts(), series.outcomes());
  const double score_hat = scoring::mean_half_brier(binned.recalibrated, series.outcomes());
  const double unc = climatological_score(series);

  ScoreDecomposition d;
  d.method = DecompositionMethod::kCalibrationRefinement;
  d.mean_score = score_p;
  d.components = {{"REL", score_p - score_hat}, {"RES", unc - score_hat}, {"UNC", unc}};
  d.extras = {{"S_recalibrated", score_hat}, {"bins", static_cast<double>(binned.bins.size())}};
  if (unc > 0.0) {
    d.skill = skill_score(d);
  } else {
    d.flags.push_back(ErrorCode::kDegenerateUncertainty);
  }
  return d;
}

double skill_score(const ScoreDecomposition& cr) {
  const double unc = cr.component("UNC");
  if (!(unc > 0.0)) {
    throw Error(ErrorCode::kDegenerateUncertainty, "skill undefined when UNC = 0");
  }
  return (cr.component("RES") - cr.component("REL")) / unc;
}

ScoreDecomposition lb_decompose(const BinaryForecastSeries& series) {
  const ClassMoments m = class_moments(series);
  ScoreDecomposition d;
  d.method = DecompositionMethod::kLikelihoodBase;
  d.mean_score = scoring::mean_half_brier(series.forecasts(), series.outcomes());
  const double cb2 =
      (m.n0 / m.n) * m.m0 * m.m0 + (m.n1 / m.n) * (1.0 - m.m1) * (1.0 - m.m1);
  d.components = {{"REF", m.var_p}, {"DIS", m.between()}, {"CB2", cb2}};
  d.extras = {{"UNC", climatological_score(series)},
              {"m0", m.m0},
              {"m1", m.m1},
              {"n0", m.n0},
              {"n1", m.n1}};
  if (m.degenerate) d.flags.push_back(ErrorCode::kDegenerateClass);
  return d;
}

ScoreDecomposition yates_decompose(const BinaryForecastSeries& series) {
  const ClassMoments m = class_moments(series);
  ScoreDecomposition d;
  d.method = DecompositionMethod::kYates;
  d.mean_score = scoring::mean_half_brier(series.forecasts(), series.outcomes());
  const double unc = climatological_score(series);
  const double vpb = m.degenerate ? 0.0 : m.between();
  const double cov = m.degenerate ? 0.0 : m.cov;
  const double ril = (m.mean_p - m.mean_x) * (m.mean_p - m.mean_x);
  d.components = {
      {"UNC", unc}, {"-2COV", -2.0 * cov}, {"VPB", vpb}, {"VPW", m.within()}, {"RIL", ril}};
  d.extras = {{"COV", cov}, {"b", m.degenerate ? 0.0 : m.m1 - m.m0}, {"m0", m.m0}, {"m1", m.m1}};
  if (m.degenerate) d.flags.push_back(ErrorCode::kDegenerateClass);
  return d;
}

MulticlassDecomposition decompose_multiclass(const MulticlassForecastSeries& series,
                                             DecompositionMethod method,
                                             const Binner& binner) {
  MulticlassDecomposition out;
  for (Category c : kAllCategories) {
    const auto binary = ingest::one_vs_all(series, c);
    ScoreDecomposition d;
    switch (method) {
      case DecompositionMethod::kCalibrationRefinement:
        d = cr_decompose(binary, binner ? binner(binary, c) : binning::pav_calibrate(binary));
        break;
      case DecompositionMethod::kLikelihoodBase: d = lb_decompose(binary); break;
      case DecompositionMethod::kYates: d = yates_decompose(binary); break;
    }
    out.per_category[static_cast<std::size_t>(c)] = std::move(d);
  }

  ScoreDecomposition& all = out.all;
  all.method = method;
  const auto& first = out.per_category[0];
  for (const auto& [name, value] : first.components) all.components.emplace_back(name, 0.0);
  for (const auto& d : out.per_category) {
    all.mean_score += d.mean_score;
    for (std::size_t k = 0; k < all.components.size(); ++k) {
      all.components[k].second += d.components[k].second;
    }
    for (ErrorCode f : d.flags) {
      if (!all.has_flag(f)) all.flags.push_back(f);
    }
  }
  // Only additive extras carry over to the totals.
  for (std::string_view name : {"COV", "UNC"}) {
    const bool present = std::any_of(first.extras.begin(), first.extras.end(),
                                     [&](const auto& e) { return e.first == name; });
    if (!present) continue;
    double total = 0.0;
    for (const auto& d : out.per_category) total += d.extra(name);
    all.extras.emplace_back(std::string(name), total);
  }
  if (method == DecompositionMethod::kCalibrationRefinement && all.component("UNC") > 0.0) {
    all.skill = skill_score(all);
  }
  return out;
}

std::vector<std::pair<std::string, std::optional<double>>> percent_of_uncertainty(
    const ScoreDecomposition& d) {
  const auto unc = d.uncertainty();
  std::vector<std::pair<std::string, std::optional<double>>> out;
  for (const auto& [name, value] : d.components) {
    if (unc && *unc > 0.0) {
      out.emplace_back(name, 100.0 * value / *unc);
    } else {
      out.emplace_back(name, std::nullopt);
    }
  }
  return out;
}

}  // namespace fverify::decomposition
