#include <doctest.h>

#include <cmath>

#include "churnkit/event_table.hpp"
#include "churnkit/nonparam.hpp"
#include "churnkit/numerics.hpp"
#include "churnkit/sim.hpp"
#include "support/oracles.hpp"
#include "support/table2.hpp"

using namespace churnkit;

namespace {

KmEstimate table2_km() {
  return kaplan_meier(build_event_table(churnkit_tests::table2_cohort()), 0.95);
}

}  // namespace

TEST_CASE("kaplan-meier reproduces the 10-player survival column") {
  const KmEstimate km = table2_km();
  const double survival[] = {0.9, 0.8, 0.7, 0.6, 0.48, 0.36, 0.24, 0.12, 0.0};
  REQUIRE(km.curve.points.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(km.curve.points[i].value == doctest::Approx(survival[i]).epsilon(1e-12));
  }
  CHECK_FALSE(km.improper);
}

TEST_CASE("kaplan-meier log-log intervals match the reference intervals") {
  const KmEstimate km = table2_km();
  const double ci[][2] = {{0.47, 0.99}, {0.41, 0.95}, {0.33, 0.89}, {0.25, 0.83},
                          {0.16, 0.75}, {0.09, 0.65}, {0.04, 0.54}, {0.01, 0.41}};
  for (std::size_t i = 0; i < 8; ++i) {
    REQUIRE(km.curve.points[i].ci_lower.has_value());
    REQUIRE(km.curve.points[i].ci_upper.has_value());
    CHECK(std::fabs(*km.curve.points[i].ci_lower - ci[i][0]) < 0.01);
    CHECK(std::fabs(*km.curve.points[i].ci_upper - ci[i][1]) < 0.01);
  }
  // no interval once survival reaches zero
  CHECK_FALSE(km.curve.points[8].ci_lower.has_value());
  CHECK_FALSE(km.curve.points[8].ci_upper.has_value());
  CHECK_FALSE(km.greenwood_var[8].has_value());
}

TEST_CASE("kaplan-meier intervals agree with a by-hand transform") {
  const KmEstimate km = table2_km();
  const auto table = build_event_table(churnkit_tests::table2_cohort());
  const double z = z_for_conf_level(0.95);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < table.size(); ++i) {
    const double n = table[i].at_risk, d = table[i].events;
    sum += d / (n * (n - d));
    const double s = km.curve.points[i].value;
    const double var_g = sum / (std::log(s) * std::log(s));
    CHECK(*km.loglog_var[i] == doctest::Approx(var_g).epsilon(1e-12));
    CHECK(*km.greenwood_var[i] == doctest::Approx(s * s * sum).epsilon(1e-12));
    const double g = std::log(-std::log(s));
    CHECK(*km.curve.points[i].ci_lower ==
          doctest::Approx(std::exp(-std::exp(g + z * std::sqrt(var_g)))).epsilon(1e-12));
    CHECK(*km.curve.points[i].ci_upper ==
          doctest::Approx(std::exp(-std::exp(g - z * std::sqrt(var_g)))).epsilon(1e-12));
  }
}

TEST_CASE("kaplan-meier trivial and error cases") {
  Cohort single{"one", {{5.0, false}}};
  const KmEstimate km = kaplan_meier(build_event_table(single), 0.95);
  REQUIRE(km.curve.points.size() == 1);
  CHECK(km.curve.points[0].time == 5.0);
  CHECK(km.curve.points[0].value == 0.0);

  CHECK_THROWS_AS(kaplan_meier({}, 0.0), InvalidInputError);
  CHECK_THROWS_AS(kaplan_meier({}, 1.0), InvalidInputError);
}

TEST_CASE("without censoring the estimate is the empirical survival") {
  churnkit::SimSpec spec;
  spec.family = make_weibull(0.5, 1.4);
  spec.n = 100;
  spec.seed = 11;
  const Cohort cohort = simulate_cohort(spec);
  const KmEstimate km = kaplan_meier(build_event_table(cohort), 0.95);
  for (const auto& p : km.curve.points) {
    CHECK(p.value ==
          doctest::Approx(churnkit_tests::empirical_survival(cohort.observations, p.time))
              .epsilon(1e-9));
  }
}

TEST_CASE("improper flag raises when someone outlives the last event") {
  Cohort cohort{"improper", {{1.0, false}, {2.0, true}}};
  const KmEstimate km = kaplan_meier(build_event_table(cohort), 0.95);
  CHECK(km.improper);
  CHECK(km.curve.points.back().value == doctest::Approx(0.5));
}

TEST_CASE("nelson-aalen matches the cumulative hazard column") {
  const NaEstimate na = nelson_aalen(build_event_table(churnkit_tests::table2_cohort()));
  const double cumhaz[] = {0.10, 0.21, 0.34, 0.48, 0.68, 0.93, 1.26, 1.76, 2.76};
  REQUIRE(na.curve.points.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(std::fabs(na.curve.points[i].value - cumhaz[i]) < 0.01);
  }
  CHECK(na.curve.points[3].value == doctest::Approx(0.1 + 1.0 / 9 + 1.0 / 8 + 1.0 / 7));
}

TEST_CASE("nelson-aalen against the brute-force risk counter") {
  const Cohort cohort = churnkit_tests::table2_cohort();
  const NaEstimate na = nelson_aalen(build_event_table(cohort));
  const auto oracle = churnkit_tests::km_oracle(cohort.observations);
  REQUIRE(na.curve.points.size() == oracle.size());
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    CHECK(na.curve.points[i].value == doctest::Approx(oracle[i].cum_hazard).epsilon(1e-12));
  }

  Cohort one{"one", {{3.0, false}}};
  const NaEstimate single = nelson_aalen(build_event_table(one));
  CHECK(single.curve.points[0].value == 1.0);
}

TEST_CASE("transforms between survival and cumulative hazard") {
  const KmEstimate km = table2_km();
  const StepCurve h = km_to_cumhaz(km);
  CHECK(h.kind == StepCurve::Kind::CumulativeHazard);
  CHECK(h.points[0].value == doctest::Approx(-std::log(0.9)).epsilon(1e-12));
  CHECK(std::isinf(h.points.back().value));

  KmEstimate flat;
  flat.curve.kind = StepCurve::Kind::Survival;
  flat.curve.points.push_back({1.0, 1.0, std::nullopt, std::nullopt});
  CHECK(km_to_cumhaz(flat).points[0].value == 0.0);

  const NaEstimate na = nelson_aalen(build_event_table(churnkit_tests::table2_cohort()));
  const StepCurve s = na_to_survival(na);
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    CHECK(-std::log(s.points[i].value) ==
          doctest::Approx(na.curve.points[i].value).epsilon(1e-12));
  }
}

TEST_CASE("nelson-aalen lies below the km cumulative hazard") {
  const KmEstimate km = table2_km();
  const NaEstimate na = nelson_aalen(build_event_table(churnkit_tests::table2_cohort()));
  const StepCurve km_h = km_to_cumhaz(km);
  for (std::size_t i = 0; i < na.curve.points.size(); ++i) {
    CHECK(na.curve.points[i].value < km_h.points[i].value);
  }
}

TEST_CASE("interval width shrinks with sample size") {
  churnkit::SimSpec spec;
  spec.family = make_exponential(0.4);
  spec.n = 10000;
  spec.seed = 5;
  spec.censor_time = 6.0;
  const Cohort big = simulate_cohort(spec);
  Cohort small = big;
  small.observations.resize(100);

  const auto width = [](const KmEstimate& km) {
    double total = 0.0;
    int count = 0;
    for (const auto& p : km.curve.points) {
      if (!p.ci_lower) continue;
      total += *p.ci_upper - *p.ci_lower;
      ++count;
    }
    return total / count;
  };
  const double w_small = width(kaplan_meier(build_event_table(small), 0.95));
  const double w_big = width(kaplan_meier(build_event_table(big), 0.95));
  CHECK(w_big < w_small);
}
