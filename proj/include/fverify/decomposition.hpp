#pragma once

#include <array>
#include <functional>

#include "fverify/domain.hpp"

namespace fverify::decomposition {

// Calibration-refinement split of the mean half-Brier score:
//   REL = S(p) - S(xhat), RES = S(xbar) - S(xhat), UNC = S(xbar),
// where xhat is the recalibrated vector carried by the binning.
// Raises kSeriesMismatch when the binning covers a different N; sets the
// kDegenerateUncertainty flag (and leaves skill empty) when UNC = 0.
ScoreDecomposition cr_decompose(const BinaryForecastSeries& series,
                                const BinnedForecasts& binned);

// (RES - REL) / UNC. Throws kDegenerateUncertainty when UNC = 0.
double skill_score(const ScoreDecomposition& cr);

// Likelihood-base split: REF = Var(P), DIS = Var_X[E(P|X)],
// CB2 = E_X{[E(P|X) - X]^2}.
ScoreDecomposition lb_decompose(const BinaryForecastSeries& series);

// UNC - 2COV + VPB + VPW + RIL. Extras carry COV, b, and the class means.
ScoreDecomposition yates_decompose(const BinaryForecastSeries& series);

struct MulticlassDecomposition {
  std::array<ScoreDecomposition, 3> per_category;  // H, D, A
  ScoreDecomposition all;                          // component-wise sums
};

// Bins one category's binary series; used for the CR method.
using Binner = std::function<BinnedForecasts(const BinaryForecastSeries&, Category)>;

MulticlassDecomposition decompose_multiclass(const MulticlassForecastSeries& series,
                                             DecompositionMethod method,
                                             const Binner& binner = {});

// Component values as a percentage of UNC (nullopt if UNC is zero or absent).
std::vector<std::pair<std::string, std::optional<double>>> percent_of_uncertainty(
    const ScoreDecomposition& d);

}  // namespace fverify::decomposition
