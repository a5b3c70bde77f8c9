#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fverify/domain.hpp"

namespace fverify::diagram {

inline constexpr std::size_t kHistogramCells = 20;
inline constexpr std::size_t kGridSteps = 100;  // grid 0.00, 0.01, ..., 1.00
inline constexpr std::size_t kMinReps = 100;

struct CalibrationPoint {
  double forecast = 0.0;   // bin mean forecast
  double frequency = 0.0;  // bin event frequency
  std::size_t count = 0;
};

struct BandPoint {
  double p = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct DiagramData {
  std::vector<CalibrationPoint> points;
  std::vector<BandPoint> band;  // empty when bands were not requested
  std::array<std::size_t, kHistogramCells> histogram{};
  double level = 0.95;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
};

struct BandOptions {
  bool enabled = true;
  double level = 0.95;
  std::size_t reps = 1000;
  std::uint64_t seed = 0;
  // Worker threads for the resampling loop; 0 means hardware concurrency.
  // Output does not depend on this value.
  unsigned threads = 0;
};

// Grid points k/100 inside [min p, max p].
std::vector<double> band_grid(std::span<const double> forecasts);

// Pointwise consistency band of the PAV recalibration curve under the null
// that the forecasts are calibrated: outcomes are redrawn as Bernoulli(p_i)
// with replicate r using random stream (seed, r).
std::vector<BandPoint> consistency_band(std::span<const double> forecasts,
                                        const BandOptions& options);

// PAV recalibration curve of (p, x) evaluated at the given grid points.
std::vector<double> isotonic_curve(const BinaryForecastSeries& series,
                                   std::span<const double> grid);

DiagramData diagram_data(const BinaryForecastSeries& series, const BinnedForecasts& binned,
                         const BandOptions& options);

std::string render_svg(const DiagramData& data, int width = 800, int height = 600);

// Sections points, band, histogram under header section,p,value,lower,upper,count.
std::string export_csv(const DiagramData& data);
// Reads back the three sections of export_csv output (level/reps/seed are not stored).
DiagramData parse_csv(std::string_view text);

}  // namespace fverify::diagram
