#include "fverify/diagram.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "fverify/binning.hpp"
#include "fverify/random.hpp"
#include "fverify/stats.hpp"

namespace fverify::diagram {

std::vector<double> band_grid(std::span<const double> forecasts) {
  const auto [lo, hi] = std::minmax_element(forecasts.begin(), forecasts.end());
  std::vector<double> grid;
  for (std::size_t k = 0; k <= kGridSteps; ++k) {
    const double g = static_cast<double>(k) / static_cast<double>(kGridSteps);
    if (g >= *lo && g <= *hi) grid.push_back(g);
  }
  return grid;
}

std::vector<BandPoint> consistency_band(std::span<const double> forecasts,
                                        const BandOptions& options) {
  if (!(options.level > 0.5 && options.level < 1.0)) {
    throw Error(ErrorCode::kBadLevel, fmt::format("level {} outside (0.5, 1)", options.level));
  }
  if (options.reps < kMinReps) {
    throw Error(ErrorCode::kBadReps,
                fmt::format("{} replicates, at least {} required", options.reps, kMinReps));
  }
  const std::vector<double> grid = band_grid(forecasts);
  if (grid.empty()) return {};

  const binning::IsotonicRegression iso(forecasts);
  const std::size_t reps = options.reps;
  const std::size_t width = grid.size();
  // curves[r * width + k]: replicate r evaluated at grid point k
  std::vector<double> curves(reps * width);

  auto run_range = [&](std::size_t begin, std::size_t end) {
    std::vector<double> draws(forecasts.size());
    for (std::size_t r = begin; r < end; ++r) {
      random::Stream stream(options.seed, r);
      for (std::size_t i = 0; i < forecasts.size(); ++i) {
        draws[i] = stream.bernoulli(forecasts[i]) ? 1.0 : 0.0;
      }
      const auto blocks = iso.fit(draws);
      for (std::size_t k = 0; k < width; ++k) {
        curves[r * width + k] = iso.evaluate(blocks, grid[k]);
      }
    }
  };

  unsigned threads = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
  threads = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(reps));
  if (threads == 1) {
    run_range(0, reps);
  } else {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (reps + threads - 1) / threads;
    for (std::size_t begin = 0; begin < reps; begin += chunk) {
      workers.emplace_back(run_range, begin, std::min(reps, begin + chunk));
    }
  }

  const double lower_prob = (1.0 - options.level) / 2.0;
  const double upper_prob = (1.0 + options.level) / 2.0;
  std::vector<BandPoint> band(width);
  std::vector<double> column(reps);
  for (std::size_t k = 0; k < width; ++k) {
    for (std::size_t r = 0; r < reps; ++r) column[r] = curves[r * width + k];
    std::sort(column.begin(), column.end());
    band[k] = {grid[k], stats::quantile_sorted(column, lower_prob),
               stats::quantile_sorted(column, upper_prob)};
  }
  return band;
}

std::vector<double> isotonic_curve(const BinaryForecastSeries& series,
                                   std::span<const double> grid) {
  const binning::IsotonicRegression iso(series.forecasts());
  const std::vector<double> targets(series.outcomes().begin(), series.outcomes().end());
  const auto blocks = iso.fit(targets);
  std::vector<double> out;
  out.reserve(grid.size());
  for (double g : grid) out.push_back(iso.evaluate(blocks, g));
  return out;
}

DiagramData diagram_data(const BinaryForecastSeries& series, const BinnedForecasts& binned,
                         const BandOptions& options) {
  if (binned.size() != series.size()) {
    throw Error(ErrorCode::kSeriesMismatch, "binning does not belong to this series");
  }
  DiagramData data;
  for (const Bin& bin : binned.bins) {
    data.points.push_back({bin.mean_forecast, bin.event_frequency, bin.count});
  }
  for (double p : series.forecasts()) {
    const auto cell = std::min(static_cast<std::size_t>(p * kHistogramCells), kHistogramCells - 1);
    ++data.histogram[cell];
  }
  data.level = options.level;
  data.seed = options.seed;
  if (options.enabled) {
    data.band = consistency_band(series.forecasts(), options);
    data.reps = options.reps;
  }
  return data;
}

namespace {

struct Frame {
  double left, right, top, bottom;
  double x(double p) const { return left + p * (right - left); }
  double y(double v) const { return bottom - v * (bottom - top); }
};

}  // namespace

std::string render_svg(const DiagramData& data, int width, int height) {
  const double w = width;
  const double h = height;
  const double strip = 0.14 * h;
  const Frame plot{70.0, w - 30.0, 30.0, h - strip - 70.0};
  const Frame hist{plot.left, plot.right, h - strip - 20.0, h - 20.0};

  std::string s;
  s += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\">\n",
      width, height, width, height);
  s += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", width,
                   height);
  // axes and ticks
  s += fmt::format(
      "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
      "stroke=\"black\"/>\n",
      plot.left, plot.top, plot.right - plot.left, plot.bottom - plot.top);
  for (int k = 0; k <= 5; ++k) {
    const double v = k / 5.0;
    s += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"12\" text-anchor=\"middle\">{:.1f}</text>\n",
        plot.x(v), plot.bottom + 16.0, v);
    s += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"12\" text-anchor=\"end\">{:.1f}</text>\n",
        plot.left - 6.0, plot.y(v) + 4.0, v);
  }
  s += fmt::format(
      "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"13\" text-anchor=\"middle\">forecast "
      "probability</text>\n",
      0.5 * (plot.left + plot.right), plot.bottom + 34.0);
  s += fmt::format(
      "<text x=\"18\" y=\"{:.2f}\" font-size=\"13\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 18 {:.2f})\">conditional event probability</text>\n",
      0.5 * (plot.top + plot.bottom), 0.5 * (plot.top + plot.bottom));

  if (!data.band.empty()) {
    s += "<polygon fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\" points=\"";
    for (const auto& b : data.band) s += fmt::format("{:.2f},{:.2f} ", plot.x(b.p), plot.y(b.upper));
    for (auto it = data.band.rbegin(); it != data.band.rend(); ++it) {
      s += fmt::format("{:.2f},{:.2f} ", plot.x(it->p), plot.y(it->lower));
    }
    s.back() = '"';
    s += "/>\n";
  }
  s += fmt::format(
      "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"gray\" "
      "stroke-dasharray=\"4 3\"/>\n",
      plot.x(0.0), plot.y(0.0), plot.x(1.0), plot.y(1.0));

  std::size_t total = 0;
  for (const auto& pt : data.points) total += pt.count;
  if (!data.points.empty()) {
    s += "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" points=\"";
    for (const auto& pt : data.points) {
      s += fmt::format("{:.2f},{:.2f} ", plot.x(pt.forecast), plot.y(pt.frequency));
    }
    s.back() = '"';
    s += "/>\n";
    for (const auto& pt : data.points) {
      const double r = 2.5 + 12.0 * std::sqrt(static_cast<double>(pt.count) /
                                              static_cast<double>(std::max<std::size_t>(total, 1)));
      s += fmt::format(
          "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\" fill=\"#d62728\" "
          "fill-opacity=\"0.7\"/>\n",
          plot.x(pt.forecast), plot.y(pt.frequency), r);
    }
  }

  // marginal distribution of the forecasts
  const std::size_t peak = *std::max_element(data.histogram.begin(), data.histogram.end());
  s += fmt::format(
      "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n",
      hist.left, hist.bottom, hist.right, hist.bottom);
  const double cell = (hist.right - hist.left) / static_cast<double>(kHistogramCells);
  for (std::size_t k = 0; k < kHistogramCells; ++k) {
    if (data.histogram[k] == 0) continue;
    const double frac = static_cast<double>(data.histogram[k]) / static_cast<double>(peak);
    const double bar = frac * (hist.bottom - hist.top);
    s += fmt::format(
        "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"#636363\"/>\n",
        hist.left + k * cell + 1.0, hist.bottom - bar, cell - 2.0, bar);
  }
  s += "</svg>\n";
  return s;
}

std::string export_csv(const DiagramData& data) {
  std::string s = "section,p,value,lower,upper,count\n";
  for (const auto& pt : data.points) {
    s += fmt::format("points,{:.6f},{:.6f},,,{}\n", pt.forecast, pt.frequency, pt.count);
  }
  for (const auto& b : data.band) {
    s += fmt::format("band,{:.6f},,{:.6f},{:.6f},\n", b.p, b.lower, b.upper);
  }
  for (std::size_t k = 0; k < kHistogramCells; ++k) {
    s += fmt::format("histogram,{:.6f},,,,{}\n",
                     static_cast<double>(k) / static_cast<double>(kHistogramCells),
                     data.histogram[k]);
  }
  return s;
}

namespace {

double field_double(std::string_view f) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || ptr != f.data() + f.size()) {
    throw Error(ErrorCode::kBadNumber, fmt::format("'{}' is not a number", f));
  }
  return v;
}

std::size_t field_count(std::string_view f) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || ptr != f.data() + f.size()) {
    throw Error(ErrorCode::kBadNumber, fmt::format("'{}' is not a count", f));
  }
  return v;
}

}  // namespace

DiagramData parse_csv(std::string_view text) {
  DiagramData data;
  std::size_t hist_cell = 0;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    std::array<std::string_view, 6> f{};
    std::size_t k = 0;
    for (std::size_t start = 0; k < f.size(); ++k) {
      const std::size_t comma = line.find(',', start);
      f[k] = line.substr(start, comma - start);
      if (comma == std::string_view::npos) {
        ++k;
        break;
      }
      start = comma + 1;
    }
    if (k != f.size()) {
      throw Error(ErrorCode::kMissingColumn, "expected 6 fields", line_no);
    }
    if (f[0] == "points") {
      data.points.push_back({field_double(f[1]), field_double(f[2]), field_count(f[5])});
    } else if (f[0] == "band") {
      data.band.push_back({field_double(f[1]), field_double(f[3]), field_double(f[4])});
    } else if (f[0] == "histogram" && hist_cell < kHistogramCells) {
      data.histogram[hist_cell++] = field_count(f[5]);
    } else {
      throw Error(ErrorCode::kMissingColumn, fmt::format("unknown section '{}'", f[0]), line_no);
    }
  }
  return data;
}

}  // namespace fverify::diagram
