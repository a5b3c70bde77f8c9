#include "fverify/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "fverify/binning.hpp"
#include "fverify/decomposition.hpp"
#include "fverify/diagram.hpp"
#include "fverify/discrimination.hpp"
#include "fverify/inference.hpp"
#include "fverify/ingest.hpp"
#include "fverify/scoring.hpp"
#include "fverify/simulate.hpp"

namespace fverify::cli {

namespace {

using Json = nlohmann::ordered_json;

// Raised for flag combinations CLI11 cannot express; maps to kExitUsage.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool is_degenerate(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegenerateUncertainty:
    case ErrorCode::kDegenerateVariance:
    case ErrorCode::kDegenerateClass:
    case ErrorCode::kDegenerateInput:
    case ErrorCode::kZeroVariance:
    case ErrorCode::kNotConverged:
      return true;
    default:
      return false;
  }
}

Json round_numbers(const Json& j) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) return nullptr;
    double r = std::round(v * 1e6) / 1e6;
    if (r == 0.0) r = 0.0;  // drop negative zero
    return r;
  }
  if (j.is_object()) {
    Json out = Json::object();
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = round_numbers(it.value());
    return out;
  }
  if (j.is_array()) {
    Json out = Json::array();
    for (const auto& v : j) out.push_back(round_numbers(v));
    return out;
  }
  return j;
}

Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

Json optional_number(const std::optional<double>& v) {
  return v ? number(*v) : Json(nullptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, fmt::format("cannot open '{}'", path));
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, fmt::format("cannot write '{}'", path));
  out << content;
}

unsigned thread_cap() {
  const char* env = std::getenv("FVERIFY_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (*end != '\0' || v == 0) return 0;
  return static_cast<unsigned>(v);
}

struct Input {
  std::optional<MulticlassForecastSeries> multiclass;
  std::optional<BinaryForecastSeries> binary;
  std::vector<std::string> warnings;
};

Input load_input(const std::string& path, bool odds) {
  const std::string text = read_file(path);
  Input in;
  ingest::CsvSchema schema = odds ? ingest::CsvSchema::kOdds : ingest::detect_schema(text);
  switch (schema) {
    case ingest::CsvSchema::kForecast: {
      auto parsed = ingest::parse_forecast_csv(text);
      in.multiclass = std::move(parsed.series);
      in.warnings = std::move(parsed.warnings);
      break;
    }
    case ingest::CsvSchema::kOdds: {
      auto parsed = ingest::parse_odds_csv(text);
      in.multiclass = std::move(parsed.series);
      in.warnings = std::move(parsed.warnings);
      break;
    }
    case ingest::CsvSchema::kBinary:
      in.binary = ingest::parse_binary_csv(text);
      break;
    case ingest::CsvSchema::kUnknown:
      throw Error(ErrorCode::kMissingColumn,
                  "header matches none of the forecast, odds, or p,x schemas", 1);
  }
  return in;
}

struct Target {
  std::string label;
  BinaryForecastSeries series;
};

std::vector<Target> select_targets(const Input& in, const std::string& category) {
  std::vector<Target> targets;
  if (in.binary) {
    targets.push_back({"binary", *in.binary});
    return targets;
  }
  if (category == "all") {
    for (Category c : kAllCategories) {
      targets.push_back({std::string(1, category_label(c)), ingest::one_vs_all(*in.multiclass, c)});
    }
    return targets;
  }
  const Category c = *parse_category(category);
  targets.push_back({std::string(1, category_label(c)), ingest::one_vs_all(*in.multiclass, c)});
  return targets;
}

// Shared state of one invocation: JSON envelope plus flags.
class Report {
 public:
  explicit Report(std::string command) : command_(std::move(command)) {}

  Json& results() { return results_; }

  void flag(const std::string& where, ErrorCode code) {
    flags_.push_back(fmt::format("{}:{}", where, to_string(code)));
    degenerate_ = degenerate_ || is_degenerate(code);
  }
  void warn(std::string message) { warnings_.push_back(std::move(message)); }

  int emit(std::ostream& out, std::ostream& err) const {
    Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = command_;
    doc["results"] = round_numbers(results_);
    doc["flags"] = flags_;
    doc["warnings"] = warnings_;
    doc["exact"] = results_;
    out << doc.dump(2) << "\n";
    for (const auto& w : warnings_) err << "warning: " << w << "\n";
    return degenerate_ ? kExitDegenerate : kExitOk;
  }

 private:
  std::string command_;
  Json results_ = Json::object();
  std::vector<std::string> flags_;
  std::vector<std::string> warnings_;
  bool degenerate_ = false;
};

struct CommonOptions {
  std::string input;
  bool odds = false;
  std::string category = "all";
};

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--input", o.input, "forecast, odds, or p,x CSV file")->required();
  sub->add_flag("--odds", o.odds, "input holds decimal odds");
  sub->add_option("--category", o.category, "H, D, A, or all")
      ->check(CLI::IsMember({"H", "D", "A", "all", "h", "d", "a"}));
}

// ---------------------------------------------------------------- score

scoring::RuleKind parse_rule(const std::string& rule) {
  if (rule == "brier") return scoring::RuleKind::kHalfBrier;
  if (rule == "log") return scoring::RuleKind::kIgnorance;
  if (rule == "zero-one") return scoring::RuleKind::kZeroOne;
  return scoring::RuleKind::kRankedProbability;
}

void run_score(const CommonOptions& o, const std::string& rule_name, Report& report) {
  const Input in = load_input(o.input, o.odds);
  for (auto& w : in.warnings) report.warn(w);
  const scoring::ScoringRule rule{parse_rule(rule_name)};
  Json& r = report.results();
  r["rule"] = rule_name;
  Json scores = Json::object();
  if (rule.kind == scoring::RuleKind::kRankedProbability) {
    if (!in.multiclass) {
      throw Error(ErrorCode::kMissingColumn, "rps needs a three-way forecast file");
    }
    scores["All"] = scoring::mean_rps(*in.multiclass);
  } else {
    double total = 0.0;
    const auto targets = select_targets(in, o.category);
    for (const auto& t : targets) {
      const double s = scoring::mean_score(t.series, rule);
      scores[t.label] = s;
      total += s;
    }
    if (targets.size() == 3) scores["All"] = total;
  }
  r["n"] = in.multiclass ? in.multiclass->size() : in.binary->size();
  r["scores"] = scores;
}

// ---------------------------------------------------------------- decompose

struct BinningOptions {
  std::string binning = "pav";
  std::size_t bins = 0;
  std::string preset;
};

void add_binning(CLI::App* sub, BinningOptions& b) {
  sub->add_option("--binning", b.binning, "fixed, quantile, or pav")
      ->check(CLI::IsMember({"fixed", "quantile", "pav"}));
  sub->add_option("--bins", b.bins, "bin count for fixed or quantile binning");
  sub->add_option("--preset", b.preset, "fixed-threshold preset")
      ->check(CLI::IsMember({"hwin10", "draw5", "awin8"}));
}

BinnedForecasts apply_binning(const BinningOptions& b, const BinaryForecastSeries& s) {
  if (b.binning == "pav") return binning::pav_calibrate(s);
  if (b.binning == "quantile") return binning::bin_quantile(s, b.bins == 0 ? 10 : b.bins);
  if (!b.preset.empty()) {
    return binning::bin_fixed(s, binning::preset_thresholds(*binning::parse_preset(b.preset)));
  }
  return binning::bin_fixed(s, binning::equal_width_thresholds(b.bins == 0 ? 10 : b.bins));
}

void check_binning(const BinningOptions& b) {
  if (!b.preset.empty() && b.binning != "fixed") {
    throw UsageError("--preset applies to --binning fixed only");
  }
  if (!b.preset.empty() && b.bins != 0) {
    throw UsageError("--bins and --preset are mutually exclusive");
  }
}

Json decomposition_json(const ScoreDecomposition& d) {
  Json j;
  j["method"] = std::string(to_string(d.method));
  j["mean_score"] = number(d.mean_score);
  j["reconstructed"] = number(d.reconstructed_score());
  const auto percents = decomposition::percent_of_uncertainty(d);
  Json comps = Json::object();
  for (std::size_t k = 0; k < d.components.size(); ++k) {
    comps[d.components[k].first] = {{"value", number(d.components[k].second)},
                                    {"percent_unc", optional_number(percents[k].second)}};
  }
  j["components"] = comps;
  Json extras = Json::object();
  for (const auto& [name, value] : d.extras) extras[name] = number(value);
  j["extras"] = extras;
  if (d.method == DecompositionMethod::kCalibrationRefinement) {
    j["skill"] = optional_number(d.skill);
  }
  Json flags = Json::array();
  for (ErrorCode f : d.flags) flags.push_back(std::string(to_string(f)));
  j["flags"] = flags;
  return j;
}

void run_decompose(const CommonOptions& o, const std::string& method_name,
                   const BinningOptions& b, Report& report) {
  check_binning(b);
  const Input in = load_input(o.input, o.odds);
  for (auto& w : in.warnings) report.warn(w);
  std::vector<DecompositionMethod> methods;
  if (method_name == "cr" || method_name == "all") {
    methods.push_back(DecompositionMethod::kCalibrationRefinement);
  }
  if (method_name == "lb" || method_name == "all") {
    methods.push_back(DecompositionMethod::kLikelihoodBase);
  }
  if (method_name == "yates" || method_name == "all") {
    methods.push_back(DecompositionMethod::kYates);
  }

  Json& r = report.results();
  r["binning"] = b.binning;
  if (!b.preset.empty()) r["preset"] = b.preset;
  Json targets_json = Json::object();
  auto record = [&](const std::string& label, const ScoreDecomposition& d) {
    for (ErrorCode f : d.flags) report.flag(fmt::format("{}/{}", label, to_string(d.method)), f);
    targets_json[label][std::string(to_string(d.method))] = decomposition_json(d);
  };

  const bool multiclass_all = in.multiclass && o.category == "all";
  for (DecompositionMethod m : methods) {
    if (multiclass_all) {
      const auto md = decomposition::decompose_multiclass(
          *in.multiclass, m,
          [&](const BinaryForecastSeries& s, Category) { return apply_binning(b, s); });
      for (Category c : kAllCategories) {
        record(std::string(1, category_label(c)), md.per_category[static_cast<std::size_t>(c)]);
      }
      record("All", md.all);
      continue;
    }
    for (const auto& t : select_targets(in, o.category)) {
      switch (m) {
        case DecompositionMethod::kCalibrationRefinement:
          record(t.label, decomposition::cr_decompose(t.series, apply_binning(b, t.series)));
          break;
        case DecompositionMethod::kLikelihoodBase:
          record(t.label, decomposition::lb_decompose(t.series));
          break;
        case DecompositionMethod::kYates:
          record(t.label, decomposition::yates_decompose(t.series));
          break;
      }
    }
  }
  r["targets"] = targets_json;
}

// ---------------------------------------------------------------- calibrate

Json test_json(const inference::TestResult& t) {
  Json j;
  j["statistic"] = number(t.statistic);
  if (t.df) j["df"] = *t.df;
  j["p"] = number(t.p_value);
  j["sided"] = t.sidedness == inference::Sidedness::kTwoSided ? "two" : "upper";
  return j;
}

void run_calibrate(const CommonOptions& o, Report& report) {
  const Input in = load_input(o.input, o.odds);
  for (auto& w : in.warnings) report.warn(w);
  Json targets_json = Json::object();
  for (const auto& t : select_targets(in, o.category)) {
    Json j;
    j["n"] = t.series.size();
    try {
      const auto sp = inference::spiegelhalter_test(t.series);
      j["spiegelhalter"] = {{"z", sp.z},
                            {"z2", sp.test.statistic},
                            {"df", *sp.test.df},
                            {"p", sp.test.p_value}};
    } catch (const Error& e) {
      if (!is_degenerate(e.code())) throw;
      report.flag(t.label + "/spiegelhalter", e.code());
      j["spiegelhalter"] = nullptr;
    }
    try {
      const auto fit = inference::fit_cox_calibration(t.series);
      Json cox;
      cox["converged"] = fit.converged;
      cox["iterations"] = fit.iterations;
      cox["separation"] = fit.separation;
      if (fit.separation) {
        cox["separation_direction"] = fit.separation_direction;
        report.flag(t.label + "/cox", ErrorCode::kNotConverged);
      }
      cox["D0"] = number(fit.deviance_null);
      cox["D1"] = number(fit.deviance_fitted);
      if (fit.converged) {
        const auto [wa, wb] = inference::wald_tests(fit);
        cox["alpha"] = {{"estimate", fit.alpha}, {"se", fit.se_alpha}, {"wald", test_json(wa)}};
        cox["beta"] = {{"estimate", fit.beta}, {"se", fit.se_beta}, {"wald", test_json(wb)}};
        cox["deviance"] = test_json(inference::deviance_test(fit));
        const auto lr = inference::ignorance_lr_test(t.series, fit);
        Json lr_json = test_json(lr.test);
        lr_json["floored"] = lr.floored;
        j["ignorance_lr"] = lr_json;
        j["profile"] = {{"label", std::string(to_string(inference::classify_profile(fit)))},
                        {"heuristic", true}};
      } else if (!fit.separation) {
        report.flag(t.label + "/cox", ErrorCode::kNotConverged);
      }
      j["cox"] = cox;
    } catch (const Error& e) {
      if (!is_degenerate(e.code())) throw;
      report.flag(t.label + "/cox", e.code());
      j["cox"] = nullptr;
    }
    targets_json[t.label] = j;
  }
  report.results()["targets"] = targets_json;
}

// ---------------------------------------------------------------- discriminate

Json five_numbers(const stats::FiveNumberSummary& s) {
  return {{"min", s.min}, {"q1", s.q1}, {"median", s.median}, {"q3", s.q3}, {"max", s.max}};
}

void run_discriminate(const CommonOptions& o, Report& report) {
  const Input in = load_input(o.input, o.odds);
  for (auto& w : in.warnings) report.warn(w);
  Json targets_json = Json::object();
  for (const auto& t : select_targets(in, o.category)) {
    try {
      const auto s = discrimination::discrimination_summary(t.series);
      Json j;
      j["n0"] = s.n0;
      j["n1"] = s.n1;
      j["mean_x0"] = s.m0;
      j["mean_x1"] = s.m1;
      j["diff"] = s.diff;
      j["mean_pct"] = {{"x0", 100.0 * s.m0}, {"x1", 100.0 * s.m1}, {"diff", 100.0 * s.diff}};
      j["wilcoxon"] = {{"z", s.wilcoxon.statistic}, {"p", s.wilcoxon.p_value}, {"sided", "upper"}};
      if (t.series.size() <= discrimination::kExactWilcoxonMaxN) {
        const auto exact = discrimination::wilcoxon_exact_test(t.series);
        j["wilcoxon_exact"] = {{"w", exact.statistic}, {"p", exact.p_value}};
      }
      j["ks"] = {{"d", s.ks.statistic}, {"p", s.ks.p_value}};
      j["c_statistic"] = s.c_statistic;
      j["five_number"] = {{"x0", five_numbers(s.class0)}, {"x1", five_numbers(s.class1)}};
      targets_json[t.label] = j;
    } catch (const Error& e) {
      if (!is_degenerate(e.code())) throw;
      report.flag(t.label, e.code());
      targets_json[t.label] = nullptr;
    }
  }
  report.results()["targets"] = targets_json;
}

// ---------------------------------------------------------------- diagram

struct DiagramOptions {
  bool bands = false;
  double level = 0.95;
  std::size_t reps = 1000;
  std::uint64_t seed = 0;
  std::string out_svg;
  std::string out_csv;
};

void run_diagram(CommonOptions o, const BinningOptions& b, const DiagramOptions& d,
                 Report& report) {
  check_binning(b);
  if (o.category == "all") {
    throw UsageError("diagram needs a single --category (H, D, or A)");
  }
  const Input in = load_input(o.input, o.odds);
  for (auto& w : in.warnings) report.warn(w);
  const auto target = select_targets(in, o.category).front();
  const auto binned = apply_binning(b, target.series);
  diagram::BandOptions band;
  band.enabled = d.bands;
  band.level = d.level;
  band.reps = d.reps;
  band.seed = d.seed;
  band.threads = thread_cap();
  const auto data = diagram::diagram_data(target.series, binned, band);

  Json& r = report.results();
  r["target"] = target.label;
  r["binning"] = b.binning;
  Json points = Json::array();
  for (const auto& p : data.points) {
    points.push_back({{"p", p.forecast}, {"xhat", p.frequency}, {"n", p.count}});
  }
  r["points"] = points;
  if (d.bands) {
    r["band"] = {{"level", data.level}, {"reps", data.reps}, {"seed", data.seed}};
    Json rows = Json::array();
    for (const auto& bp : data.band) {
      rows.push_back({{"p", bp.p}, {"lower", bp.lower}, {"upper", bp.upper}});
    }
    r["band"]["points"] = rows;
  }
  r["histogram"] = data.histogram;
  if (!d.out_svg.empty()) {
    write_file(d.out_svg, diagram::render_svg(data));
    r["svg"] = d.out_svg;
  }
  if (!d.out_csv.empty()) {
    write_file(d.out_csv, diagram::export_csv(data));
    r["csv"] = d.out_csv;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Verification of probability forecasts for binary and three-way outcomes",
               "fverify"};
  app.require_subcommand(1);

  CommonOptions common;
  BinningOptions binning_opts;
  DiagramOptions diagram_opts;
  std::string rule = "brier";
  std::string method = "all";

  auto* score = app.add_subcommand("score", "mean scores per category");
  add_common(score, common);
  score->add_option("--rule", rule, "brier, log, zero-one, or rps")
      ->check(CLI::IsMember({"brier", "log", "zero-one", "rps"}));

  auto* decompose = app.add_subcommand("decompose", "Brier score decompositions");
  add_common(decompose, common);
  decompose->add_option("--method", method, "cr, lb, yates, or all")
      ->check(CLI::IsMember({"cr", "lb", "yates", "all"}));
  add_binning(decompose, binning_opts);

  auto* calibrate = app.add_subcommand("calibrate", "reliability tests and Cox calibration fit");
  add_common(calibrate, common);

  auto* discriminate = app.add_subcommand("discriminate", "conditional forecast distributions");
  add_common(discriminate, common);

  auto* diagram_cmd = app.add_subcommand("diagram", "reliability diagram data and rendering");
  add_common(diagram_cmd, common);
  add_binning(diagram_cmd, binning_opts);
  diagram_cmd->add_flag("--bands", diagram_opts.bands, "compute consistency bands");
  diagram_cmd->add_option("--level", diagram_opts.level, "band confidence level");
  diagram_cmd->add_option("--reps", diagram_opts.reps, "band resamples");
  diagram_cmd->add_option("--seed", diagram_opts.seed, "random seed");
  diagram_cmd->add_option("--out-svg", diagram_opts.out_svg, "SVG output path");
  diagram_cmd->add_option("--out-csv", diagram_opts.out_csv, "CSV output path");

  std::string odds_input;
  auto* odds_convert = app.add_subcommand("odds-convert", "odds CSV to forecast CSV");
  odds_convert->add_option("--input", odds_input, "odds CSV file")->required();

  simulate::GeneratorConfig sim;
  std::string law = "beta:2,2";
  auto* simulate_cmd = app.add_subcommand("simulate", "synthetic p,x series");
  simulate_cmd->add_option("--n", sim.n, "observations")->required();
  simulate_cmd->add_option("--alpha", sim.alpha, "calibration intercept");
  simulate_cmd->add_option("--beta", sim.beta, "calibration slope");
  simulate_cmd->add_option("--law", law, "uniform:lo,hi or beta:a,b");
  simulate_cmd->add_option("--seed", sim.seed, "random seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }
  if (*diagram_cmd && diagram_cmd->count("--category") == 0) common.category = "H";
  if (common.category.size() == 1) {
    common.category = std::string(1, static_cast<char>(std::toupper(common.category[0])));
  }

  try {
    if (*odds_convert) {
      const auto parsed = ingest::parse_odds_csv(read_file(odds_input));
      for (const auto& w : parsed.warnings) err << "warning: " << w << "\n";
      out << ingest::write_forecast_csv(parsed.series);
      return kExitOk;
    }
    if (*simulate_cmd) {
      sim.law = simulate::parse_law(law);
      out << ingest::write_binary_csv(simulate::generate(sim));
      return kExitOk;
    }
    Report report(app.get_subcommands().front()->get_name());
    if (*score) {
      run_score(common, rule, report);
    } else if (*decompose) {
      run_decompose(common, method, binning_opts, report);
    } else if (*calibrate) {
      run_calibrate(common, report);
    } else if (*discriminate) {
      run_discriminate(common, report);
    } else if (*diagram_cmd) {
      run_diagram(common, binning_opts, diagram_opts, report);
    }
    return report.emit(out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_degenerate(e.code()) ? kExitDegenerate : kExitInputError;
  }
}

}  // namespace fverify::cli
