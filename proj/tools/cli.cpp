#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "churnkit/churnkit.hpp"

namespace churnkit::cli {

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::string pvalue_text(double p) {
  char buf[32];
  if (p >= 0.001) {
    std::snprintf(buf, sizeof(buf), "%.3f", p);
  } else {
    std::snprintf(buf, sizeof(buf), "%.2e", p);
  }
  return buf;
}

void write_aligned(std::ostream& out, const std::vector<std::vector<std::string>>& rows,
                   bool csv) {
  if (rows.empty()) return;
  if (csv) {
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out << ',';
        out << row[c];
      }
      out << '\n';
    }
    return;
  }
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << "  ";
      out << std::string(width[c] - row[c].size(), ' ') << row[c];
    }
    out << '\n';
  }
}

struct InputOptions {
  std::string input;
  bool sessions = false;
  std::string cutoff;
  double window_days = 14.0;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--input", in.input, "input CSV file")->required();
  cmd->add_flag("--sessions", in.sessions,
                "input is a sessions CSV (player_id,start_iso8601,end_iso8601)");
  cmd->add_option("--cutoff", in.cutoff,
                  "collection cutoff timestamp (ISO-8601); defaults to the last session end");
  cmd->add_option("--window", in.window_days, "inactivity window in days")
      ->check(CLI::PositiveNumber);
}

Cohort load_cohort(const InputOptions& in) {
  IngestConfig config;
  config.inactivity_window_s = static_cast<std::int64_t>(std::llround(in.window_days * 86400.0));
  if (!in.cutoff.empty()) config.collection_cutoff = parse_iso8601(in.cutoff);
  return read_cohort(in.input, in.sessions ? FileFormat::Sessions : FileFormat::Durations,
                     config);
}

void add_conf_option(CLI::App* cmd, double& conf) {
  cmd->add_option("--conf", conf, "confidence level, default 0.95")
      ->check([](const std::string& s) -> std::string {
        const double v = std::atof(s.c_str());
        if (!(v > 0.0 && v < 1.0)) return "confidence level must lie strictly inside (0,1)";
        return "";
      });
}

}  // namespace

void emit_curve(const StepCurve& curve, std::ostream& out) {
  out << "t,value,ci_lower,ci_upper\n";
  if (curve.points.empty()) return;
  const double baseline = curve.kind == StepCurve::Kind::Survival ? 1.0 : 0.0;
  out << "0," << shortest(baseline) << ",,\n";
  for (const StepCurve::Point& p : curve.points) {
    out << shortest(p.time) << ',' << shortest(p.value) << ',';
    if (p.ci_lower) out << shortest(*p.ci_lower);
    out << ',';
    if (p.ci_upper) out << shortest(*p.ci_upper);
    out << '\n';
  }
}

void emit_curve(const HazardCurve& curve, std::ostream& out) {
  out << "t,value,ci_lower,ci_upper\n";
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    out << shortest(curve.grid[i]) << ',' << shortest(curve.values[i]) << ",,\n";
  }
}

namespace {

template <typename CurveT>
void emit_curve_to_path(const CurveT& curve, const std::string& path) {
  std::ofstream file(path);
  if (!file) {
    throw IoError("cannot write '" + path + "'");
  }
  emit_curve(curve, file);
  if (!file.good()) {
    throw IoError("write failed for '" + path + "'");
  }
}

}  // namespace

void emit_curve(const StepCurve& curve, const std::string& path) {
  emit_curve_to_path(curve, path);
}

void emit_curve(const HazardCurve& curve, const std::string& path) {
  emit_curve_to_path(curve, path);
}

namespace {

struct CommonDisplay {
  std::string format = "text";
  int precision = 2;

  bool csv = false;
  void resolve() { csv = format == "csv"; }
};

void add_display_options(CLI::App* cmd, CommonDisplay& display) {
  cmd->add_option("--format", display.format, "output format: text (default) or csv")
      ->check(CLI::IsMember({"text", "csv"}));
  cmd->add_option("--precision", display.precision, "display decimals, default 2")
      ->check(CLI::Range(0, 17));
}

std::string ci_text(const std::optional<double>& lower, const std::optional<double>& upper,
                    int precision) {
  const std::string lo = lower ? fixed(*lower, precision) : "NA";
  const std::string hi = upper ? fixed(*upper, precision) : "NA";
  return "[" + lo + ", " + hi + "]";
}

int run_km(const InputOptions& in, double conf, const CommonDisplay& display,
           const std::string& out_path, bool na_only, std::ostream& out) {
  const Cohort cohort = load_cohort(in);
  const std::vector<EventTableRow> table = build_event_table(cohort);
  const NaEstimate na = nelson_aalen(table);

  if (na_only) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"time", "at_risk", "events", "cum_hazard", "survival"});
    const StepCurve na_survival = na_to_survival(na);
    for (std::size_t i = 0; i < table.size(); ++i) {
      rows.push_back({fixed(table[i].time, display.precision), std::to_string(table[i].at_risk),
                      std::to_string(table[i].events),
                      fixed(na.curve.points[i].value, display.precision),
                      fixed(na_survival.points[i].value, display.precision)});
    }
    write_aligned(out, rows, display.csv);
    if (!out_path.empty()) emit_curve(na.curve, out_path);
    return 0;
  }

  const KmEstimate km = kaplan_meier(table, conf);
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"time", "at_risk", "events", "hazard", "cum_hazard", "survival", "ci_lower",
                  "ci_upper"});
  for (std::size_t i = 0; i < table.size(); ++i) {
    const StepCurve::Point& p = km.curve.points[i];
    rows.push_back({fixed(table[i].time, display.precision), std::to_string(table[i].at_risk),
                    std::to_string(table[i].events),
                    fixed(static_cast<double>(table[i].events) / table[i].at_risk,
                          display.precision),
                    fixed(na.curve.points[i].value, display.precision),
                    fixed(p.value, display.precision),
                    p.ci_lower ? fixed(*p.ci_lower, display.precision) : "",
                    p.ci_upper ? fixed(*p.ci_upper, display.precision) : ""});
  }
  write_aligned(out, rows, display.csv);
  if (!out_path.empty()) emit_curve(km.curve, out_path);
  return 0;
}

int run_fit(const InputOptions& in, const std::string& family, double conf,
            const CommonDisplay& display, std::ostream& out, std::ostream& err) {
  const Cohort cohort = load_cohort(in);
  const std::optional<FamilyKind> kind = family_from_name(family);
  if (!kind) {
    throw InvalidInputError("unknown family '" + family + "'");
  }
  const FitResult fit = *kind == FamilyKind::Exponential ? fit_exponential(cohort, conf)
                                                         : fit_mle(*kind, cohort, conf);
  out << "family " << family_name(fit.family.kind) << "\n";
  const std::vector<std::string> names = param_names(fit.family.kind);
  for (std::size_t i = 0; i < names.size(); ++i) {
    out << names[i] << " " << fixed(fit.family.params[i], display.precision) << " CI "
        << ci_text(fit.ci[i].lower, fit.ci[i].upper, display.precision) << "\n";
  }
  out << "log_likelihood " << fixed(fit.log_likelihood, display.precision) << "\n";
  out << "churns " << fit.churn_count << "\n";
  out << "time_at_risk " << fixed(fit.total_time_at_risk, display.precision) << "\n";
  if (fit.hessian_warning) {
    err << "churnkit: warning: observed information is not positive definite\n";
  }
  return 0;
}

int run_hazard(const InputOptions& in, const std::string& kernel, double bandwidth, double bins,
               const CommonDisplay& display, const std::string& out_path, std::ostream& out) {
  const Cohort cohort = load_cohort(in);
  if (bins > 0.0) {
    const PiecewiseRates rates = piecewise_exponential(cohort, bins);
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"bin_start", "bin_end", "events", "exposure", "rate"});
    for (std::size_t k = 0; k < rates.bins.size(); ++k) {
      const PiecewiseRates::Bin& bin = rates.bins[k];
      rows.push_back({fixed(k * rates.bin_width, display.precision),
                      fixed((k + 1) * rates.bin_width, display.precision),
                      std::to_string(bin.events), fixed(bin.exposure, display.precision),
                      bin.rate ? fixed(*bin.rate, display.precision) : ""});
    }
    write_aligned(out, rows, display.csv);
    if (!out_path.empty()) {
      HazardCurve curve;
      for (std::size_t k = 0; k < rates.bins.size(); ++k) {
        if (!rates.bins[k].rate) continue;
        curve.grid.push_back(k * rates.bin_width);
        curve.values.push_back(*rates.bins[k].rate);
      }
      emit_curve(curve, out_path);
    }
    return 0;
  }

  const std::vector<EventTableRow> table = build_event_table(cohort);
  KernelSpec spec;
  if (kernel == "uniform") {
    spec.kind = KernelKind::Uniform;
  } else if (kernel == "epanechnikov") {
    spec.kind = KernelKind::Epanechnikov;
  } else if (kernel == "gaussian") {
    spec.kind = KernelKind::Gaussian;
  } else {
    throw InvalidInputError("unknown kernel '" + kernel + "'");
  }
  spec.bandwidth = bandwidth > 0.0 ? bandwidth : default_bandwidth(table);
  const HazardCurve curve = kernel_hazard(table, spec, default_grid(table));
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"time", "hazard"});
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    rows.push_back({fixed(curve.grid[i], display.precision),
                    fixed(curve.values[i], display.precision)});
  }
  write_aligned(out, rows, display.csv);
  if (!out_path.empty()) emit_curve(curve, out_path);
  return 0;
}

int run_metrics(const InputOptions& in, double conf, const std::vector<double>& quantiles,
                const CommonDisplay& display, std::ostream& out) {
  const Cohort cohort = load_cohort(in);
  const std::vector<EventTableRow> table = build_event_table(cohort);
  const KmEstimate km = kaplan_meier(table, conf);

  double max_obs = 0.0;
  for (const Observation& obs : cohort.observations) {
    max_obs = std::max(max_obs, obs.duration_hours);
  }
  const MeanEstimate mean = mean_auc(table, km, conf, max_obs);
  out << "mean " << fixed(mean.mean, display.precision) << " CI "
      << ci_text(mean.ci_lower, mean.ci_upper, display.precision)
      << (mean.restricted ? " (restricted)" : "") << "\n";

  const QuantileEstimate median = quantile(km, 0.5, conf);
  out << "median "
      << (median.estimate ? fixed(*median.estimate, display.precision) : std::string("NA"))
      << " CI " << ci_text(median.ci_lower, median.ci_upper, display.precision) << "\n";

  if (!quantiles.empty()) {
    for (const QuantileEstimate& q : quantile_profile(km, quantiles, conf)) {
      out << "quantile " << fixed(q.p, 2) << " "
          << (q.estimate ? fixed(*q.estimate, display.precision) : std::string("NA")) << " CI "
          << ci_text(q.ci_lower, q.ci_upper, display.precision) << "\n";
    }
  }
  return 0;
}

int run_abtest(const std::string& control_path, const std::string& test_path, double rho,
               bool rho_set, const std::string& strata, const CommonDisplay& display,
               std::ostream& out) {
  std::optional<WeightSpec> weights;
  if (rho_set) weights = WeightSpec{rho};

  LogRankResult result;
  if (!strata.empty()) {
    const std::map<std::string, Cohort> control = read_stratified_durations(control_path, strata);
    const std::map<std::string, Cohort> test = read_stratified_durations(test_path, strata);
    std::vector<std::pair<Cohort, Cohort>> pairs;
    for (const auto& [key, cohort] : control) {
      const auto it = test.find(key);
      pairs.push_back({cohort, it == test.end() ? Cohort{} : it->second});
    }
    for (const auto& [key, cohort] : test) {
      if (control.find(key) == control.end()) pairs.push_back({Cohort{}, cohort});
    }
    result = stratified_logrank(pairs, weights);
  } else {
    const Cohort control = read_durations(control_path);
    const Cohort test = read_durations(test_path);
    result = weights ? logrank(control, test, *weights) : logrank(control, test);
  }
  out << "chi2 " << fixed(result.chi2, display.precision) << ", p "
      << pvalue_text(result.p_value) << (result.p_underflow ? " (underflow)" : "") << "\n";
  return 0;
}

int run_simulate(const std::string& family, const std::vector<double>& params, int n,
                 double censor_time, bool censor_set, std::uint64_t seed,
                 const std::string& out_path, std::ostream& out) {
  const std::optional<FamilyKind> kind = family_from_name(family);
  if (!kind) {
    throw InvalidInputError("unknown family '" + family + "'");
  }
  SimSpec spec;
  spec.family.kind = *kind;
  spec.family.params = params;
  spec.n = n;
  if (censor_set) spec.censor_time = censor_time;
  spec.seed = seed;
  const Cohort cohort = simulate_cohort(spec);
  if (out_path.empty()) {
    write_durations(cohort, out);
  } else {
    write_durations(cohort, out_path);
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"survival-analysis toolkit for censored playtime data"};
  app.set_help_all_flag("--help-all");
  app.require_subcommand(1);

  InputOptions in;
  CommonDisplay display;
  double conf = 0.95;
  std::string out_path;

  // km
  CLI::App* km = app.add_subcommand("km", "Kaplan-Meier survival estimate");
  add_input_options(km, in);
  add_conf_option(km, conf);
  add_display_options(km, display);
  km->add_option("--out", out_path, "write the survival curve CSV here");

  // na
  CLI::App* na = app.add_subcommand("na", "Nelson-Aalen cumulative hazard estimate");
  add_input_options(na, in);
  add_display_options(na, display);
  na->add_option("--out", out_path, "write the cumulative hazard curve CSV here");

  // fit
  std::string family = "exponential";
  CLI::App* fit = app.add_subcommand("fit", "parametric maximum-likelihood fit");
  add_input_options(fit, in);
  fit->add_option("--family", family, "exponential|weibull|loglogistic|lognormal");
  add_conf_option(fit, conf);
  add_display_options(fit, display);

  // hazard
  std::string kernel = "epanechnikov";
  double bandwidth = 0.0;
  double bins = 0.0;
  CLI::App* hazard = app.add_subcommand("hazard", "nonparametric hazard rate");
  add_input_options(hazard, in);
  hazard->add_option("--kernel", kernel, "uniform|epanechnikov|gaussian");
  hazard->add_option("--bandwidth", bandwidth, "kernel bandwidth in hours")
      ->check(CLI::PositiveNumber);
  hazard->add_option("--bins", bins, "piecewise-exponential bin width in hours")
      ->check(CLI::PositiveNumber);
  add_display_options(hazard, display);
  hazard->add_option("--out", out_path, "write the hazard curve CSV here");

  // metrics
  std::vector<double> quantiles;
  CLI::App* metrics = app.add_subcommand("metrics", "mean and quantile playtime metrics");
  add_input_options(metrics, in);
  add_conf_option(metrics, conf);
  metrics->add_option("--quantiles", quantiles, "comma-separated quantile levels in (0,1]")
      ->delimiter(',');
  add_display_options(metrics, display);

  // abtest
  std::string control_path, test_path, strata;
  double rho = 0.0;
  CLI::App* abtest = app.add_subcommand("abtest", "log-rank comparison of two cohorts");
  abtest->add_option("--control", control_path, "control cohort durations CSV")->required();
  abtest->add_option("--test", test_path, "test cohort durations CSV")->required();
  CLI::Option* rho_opt =
      abtest->add_option("--rho", rho, "weight exponent: 0 plain-weighted, 1 Peto-Peto")
          ->check(CLI::NonNegativeNumber);
  abtest->add_option("--strata", strata, "stratify on this extra CSV column");
  add_display_options(abtest, display);

  // simulate
  std::vector<double> params;
  int n = 0;
  double censor_time = 0.0;
  std::uint64_t seed = 0;
  CLI::App* simulate = app.add_subcommand("simulate", "draw a synthetic cohort");
  simulate->add_option("--family", family, "exponential|weibull|loglogistic|lognormal");
  simulate->add_option("--params", params, "family parameters, comma separated")
      ->delimiter(',')
      ->required();
  simulate->add_option("--n", n, "number of observations")->required()
      ->check(CLI::NonNegativeNumber);
  CLI::Option* censor_opt =
      simulate->add_option("--censor-time", censor_time, "administrative censoring time, hours")
          ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed, "random seed, default 0");
  simulate->add_option("--out", out_path, "write the durations CSV here (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "churnkit: " << e.what() << "\n";
    return 2;
  }
  display.resolve();

  try {
    if (km->parsed()) return run_km(in, conf, display, out_path, false, out);
    if (na->parsed()) return run_km(in, conf, display, out_path, true, out);
    if (fit->parsed()) return run_fit(in, family, conf, display, out, err);
    if (hazard->parsed()) {
      return run_hazard(in, kernel, bandwidth, bins, display, out_path, out);
    }
    if (metrics->parsed()) return run_metrics(in, conf, quantiles, display, out);
    if (abtest->parsed()) {
      return run_abtest(control_path, test_path, rho, rho_opt->count() > 0, strata, display,
                        out);
    }
    if (simulate->parsed()) {
      return run_simulate(family, params, n, censor_time, censor_opt->count() > 0, seed,
                          out_path, out);
    }
  } catch (const InvalidInputError& e) {
    err << "churnkit: " << e.what() << "\n";
    return 1;
  } catch (const DegenerateDataError& e) {
    err << "churnkit: " << e.what() << "\n";
    return 1;
  } catch (const ConvergenceError& e) {
    err << "churnkit: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    err << "churnkit: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    err << "churnkit: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace churnkit::cli
