#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "churnkit/churnkit.hpp"
#include "cli.hpp"
#include "support/table2.hpp"

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "churnkit");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliResult r;
  r.code = churnkit::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string sample_csv() {
  const std::string path = "cli_test_sample.csv";
  std::ofstream f(path);
  f << churnkit_tests::table2_csv_text();
  return path;
}

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("km table matches the reference columns") {
  const std::string path = sample_csv();
  const CliResult r = run_cli({"km", "--input", path, "--conf", "0.95"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "time"));
  CHECK(contains(r.out, "survival"));
  CHECK(contains(r.out, "0.90"));
  CHECK(contains(r.out, "0.47"));
  CHECK(contains(r.out, "0.99"));
  CHECK(contains(r.out, "2.76"));
  CHECK(contains(r.out, "11.92"));
  // byte-identical reruns
  const CliResult again = run_cli({"km", "--input", path, "--conf", "0.95"});
  CHECK(again.out == r.out);
  std::remove(path.c_str());
}

TEST_CASE("metrics output keeps the reference shape") {
  const std::string path = sample_csv();
  const CliResult r = run_cli({"metrics", "--input", path});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "mean 3.28 CI [0.81, 5.75]"));
  CHECK(contains(r.out, "median 1.85 CI [0.00, 5.93]"));

  const CliResult q = run_cli({"metrics", "--input", path, "--quantiles", "0.1,0.4"});
  CHECK(q.code == 0);
  CHECK(contains(q.out, "quantile 0.10 0.00"));
  CHECK(contains(q.out, "quantile 0.40 0.38"));
  std::remove(path.c_str());
}

TEST_CASE("fit prints the closed-form exponential estimate") {
  const std::string path = sample_csv();
  const CliResult r = run_cli({"fit", "--input", path});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "family exponential"));
  CHECK(contains(r.out, "lambda 0.32 CI [0.11, 0.53]"));
  CHECK(contains(r.out, "churns 9"));
  CHECK(contains(r.out, "time_at_risk 28.20"));

  const CliResult weibull = run_cli({"fit", "--input", path, "--family", "weibull"});
  CHECK(weibull.code == 0);
  CHECK(contains(weibull.out, "alpha"));
  std::remove(path.c_str());
}

TEST_CASE("abtest of a file against itself is flat") {
  const std::string path = sample_csv();
  const CliResult r = run_cli({"abtest", "--control", path, "--test", path});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "chi2 0.00, p 1.000"));

  const CliResult weighted =
      run_cli({"abtest", "--control", path, "--test", path, "--rho", "1"});
  CHECK(weighted.code == 0);
  CHECK(contains(weighted.out, "chi2 0.00, p 1.000"));
  std::remove(path.c_str());
}

TEST_CASE("stratified abtest reads the extra column") {
  const std::string control = "cli_test_control.csv";
  const std::string test = "cli_test_test.csv";
  {
    std::ofstream c(control);
    c << "player_id,duration_hours,censored,country\n"
         "a,1.0,0,fi\nb,2.0,0,fi\nc,0.5,0,se\nd,1.5,0,se\n";
    std::ofstream t(test);
    t << "player_id,duration_hours,censored,country\n"
         "e,1.2,0,fi\nf,2.2,0,fi\ng,0.7,0,se\nh,1.9,1,se\n";
  }
  const CliResult r = run_cli(
      {"abtest", "--control", control, "--test", test, "--strata", "country"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "chi2 "));

  // matches the library path
  const auto control_strata = churnkit::read_stratified_durations(control, "country");
  const auto test_strata = churnkit::read_stratified_durations(test, "country");
  std::vector<std::pair<churnkit::Cohort, churnkit::Cohort>> pairs;
  for (const auto& [key, cohort] : control_strata) {
    pairs.push_back({cohort, test_strata.at(key)});
  }
  const churnkit::LogRankResult direct = churnkit::stratified_logrank(pairs);
  char expect[64];
  std::snprintf(expect, sizeof(expect), "chi2 %.2f", direct.chi2);
  CHECK(contains(r.out, expect));
  std::remove(control.c_str());
  std::remove(test.c_str());
}

TEST_CASE("hazard subcommand covers both estimators") {
  const std::string path = sample_csv();
  const CliResult bins = run_cli({"hazard", "--input", path, "--bins", "1"});
  CHECK(bins.code == 0);
  CHECK(contains(bins.out, "0.63"));
  CHECK(contains(bins.out, "1.09"));

  const CliResult kern =
      run_cli({"hazard", "--input", path, "--kernel", "epanechnikov", "--bandwidth", "9.6"});
  CHECK(kern.code == 0);
  CHECK(contains(kern.out, "hazard"));
  std::remove(path.c_str());
}

TEST_CASE("curve files round trip exactly") {
  const std::string path = sample_csv();
  const std::string curve_path = "cli_test_curve.csv";
  const CliResult r = run_cli({"km", "--input", path, "--out", curve_path});
  CHECK(r.code == 0);

  const auto lines = read_lines(curve_path);
  REQUIRE(lines.size() == 11);  // header + baseline + nine events
  CHECK(lines[0] == "t,value,ci_lower,ci_upper");
  CHECK(lines[1] == "0,1,,");

  const churnkit::KmEstimate km = churnkit::kaplan_meier(
      churnkit::build_event_table(churnkit_tests::table2_cohort()), 0.95);
  for (std::size_t i = 0; i < km.curve.points.size(); ++i) {
    const std::string& line = lines[i + 2];
    const auto comma1 = line.find(',');
    const auto comma2 = line.find(',', comma1 + 1);
    const double t = std::strtod(line.substr(0, comma1).c_str(), nullptr);
    const double v = std::strtod(line.substr(comma1 + 1, comma2 - comma1 - 1).c_str(), nullptr);
    CHECK(t == km.curve.points[i].time);
    CHECK(v == km.curve.points[i].value);
  }
  std::remove(path.c_str());
  std::remove(curve_path.c_str());
}

TEST_CASE("an empty curve writes only the header") {
  const std::string path = "cli_test_censored.csv";
  {
    std::ofstream f(path);
    f << "player_id,duration_hours,censored\nx,1.0,1\ny,2.0,1\n";
  }
  const std::string curve_path = "cli_test_empty_curve.csv";
  const CliResult r = run_cli({"km", "--input", path, "--out", curve_path});
  CHECK(r.code == 0);
  const auto lines = read_lines(curve_path);
  REQUIRE(lines.size() == 1);
  CHECK(lines[0] == "t,value,ci_lower,ci_upper");
  std::remove(path.c_str());
  std::remove(curve_path.c_str());
}

TEST_CASE("simulate emits a readable cohort deterministically") {
  const CliResult r = run_cli({"simulate", "--family", "exponential", "--params", "0.5", "--n",
                               "5", "--seed", "7"});
  CHECK(r.code == 0);
  const CliResult again = run_cli({"simulate", "--family", "exponential", "--params", "0.5",
                                   "--n", "5", "--seed", "7"});
  CHECK(r.out == again.out);
  CHECK(contains(r.out, "player_id,duration_hours,censored"));

  const std::string out_path = "cli_test_sim.csv";
  const CliResult filed =
      run_cli({"simulate", "--family", "weibull", "--params", "0.5,1.5", "--n", "50",
               "--censor-time", "2", "--seed", "11", "--out", out_path});
  CHECK(filed.code == 0);
  const churnkit::Cohort cohort = churnkit::read_durations(out_path);
  CHECK(cohort.size() == 50);
  const CliResult km = run_cli({"km", "--input", out_path});
  CHECK(km.code == 0);
  std::remove(out_path.c_str());
}

TEST_CASE("sessions input flows through the same commands") {
  const std::string path = "cli_test_sessions.csv";
  {
    std::ofstream f(path);
    f << "player_id,start_iso8601,end_iso8601\n"
         "a,2015-09-01T10:00:00Z,2015-09-01T12:00:00Z\n"
         "b,2015-09-03T10:00:00Z,2015-09-03T11:00:00Z\n"
         "c,2015-10-14T10:00:00Z,2015-10-14T23:00:00Z\n";
  }
  const CliResult r = run_cli({"km", "--input", path, "--sessions", "--cutoff",
                               "2015-10-15T00:00:00Z", "--window", "14"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "survival"));
  std::remove(path.c_str());
}

TEST_CASE("precision and format flags change the rendering") {
  const std::string path = sample_csv();
  const CliResult fine = run_cli({"metrics", "--input", path, "--precision", "4"});
  CHECK(contains(fine.out, "median 1.8500"));
  const CliResult csv = run_cli({"km", "--input", path, "--format", "csv"});
  CHECK(contains(csv.out, "time,at_risk,events,hazard,cum_hazard,survival,ci_lower,ci_upper"));
  CHECK(contains(csv.out, "11.92,1,1,1.00,2.76,0.00,,"));
  std::remove(path.c_str());
}

TEST_CASE("exit codes separate usage errors from data errors") {
  const CliResult usage = run_cli({"km"});
  CHECK(usage.code == 2);
  CHECK_FALSE(usage.err.empty());

  const CliResult unknown_flag = run_cli({"km", "--frobnicate"});
  CHECK(unknown_flag.code == 2);

  const CliResult bad_conf = run_cli({"km", "--input", "x.csv", "--conf", "1.5"});
  CHECK(bad_conf.code == 2);

  const CliResult missing = run_cli({"km", "--input", "cli_test_missing.csv"});
  CHECK(missing.code == 1);
  CHECK(contains(missing.err, "churnkit:"));

  const std::string path = "cli_test_all_censored.csv";
  {
    std::ofstream f(path);
    f << "player_id,duration_hours,censored\nx,1.0,1\n";
  }
  const CliResult degenerate = run_cli({"fit", "--input", path});
  CHECK(degenerate.code == 1);
  CHECK(contains(degenerate.err, "churnkit:"));
  std::remove(path.c_str());

  const CliResult help = run_cli({"--help"});
  CHECK(help.code == 0);
  CHECK(contains(help.out, "km"));
}

TEST_CASE("an unwritable output path is a data error") {
  const std::string path = sample_csv();
  const CliResult r =
      run_cli({"km", "--input", path, "--out", "no_such_dir/curve.csv"});
  CHECK(r.code == 1);
  CHECK(contains(r.err, "churnkit:"));
  std::remove(path.c_str());
}
