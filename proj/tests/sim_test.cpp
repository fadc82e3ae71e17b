#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "churnkit/event_table.hpp"
#include "churnkit/nonparam.hpp"
#include "churnkit/sim.hpp"

using namespace churnkit;

TEST_CASE("simulation basics") {
  SimSpec spec;
  spec.family = make_exponential(0.5);
  spec.n = 0;
  CHECK(simulate_cohort(spec).size() == 0);

  spec.n = 50;
  spec.seed = 123;
  const Cohort a = simulate_cohort(spec);
  const Cohort b = simulate_cohort(spec);
  REQUIRE(a.size() == 50);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.observations[i].duration_hours == b.observations[i].duration_hours);
    CHECK(a.observations[i].censored == b.observations[i].censored);
  }
  spec.seed = 124;
  const Cohort c = simulate_cohort(spec);
  bool any_different = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    any_different |= a.observations[i].duration_hours != c.observations[i].duration_hours;
  }
  CHECK(any_different);

  spec.n = -1;
  CHECK_THROWS_AS(simulate_cohort(spec), InvalidInputError);
  spec.n = 1;
  spec.censor_time = 0.0;
  CHECK_THROWS_AS(simulate_cohort(spec), InvalidInputError);
}

TEST_CASE("administrative censoring hits the analytic fraction") {
  SimSpec spec;
  spec.family = make_exponential(0.5);
  spec.n = 20000;
  spec.seed = 9;
  spec.censor_time = 2.0;
  const Cohort cohort = simulate_cohort(spec);
  int censored = 0;
  for (const auto& obs : cohort.observations) {
    censored += obs.censored ? 1 : 0;
    if (obs.censored) CHECK(obs.duration_hours == 2.0);
    CHECK(obs.duration_hours <= 2.0);
  }
  // S(2) = exp(-1)
  CHECK(static_cast<double>(censored) / spec.n ==
        doctest::Approx(std::exp(-1.0)).epsilon(0.03));
  CHECK(std::fabs(static_cast<double>(censored) / spec.n - std::exp(-1.0)) < 0.01);
}

TEST_CASE("inverse survival inverts every family") {
  const Family families[] = {make_exponential(0.32), make_weibull(0.5, 1.5),
                             make_loglogistic(0.4, 2.0), make_lognormal(0.5, 1.2)};
  for (const Family& f : families) {
    for (double u = 0.05; u < 1.0; u += 0.05) {
      CHECK(survival(f, inverse_survival(f, u)) == doctest::Approx(u).epsilon(1e-8));
    }
  }
  CHECK_THROWS_AS(inverse_survival(families[0], 0.0), InvalidInputError);
  CHECK_THROWS_AS(inverse_survival(families[0], 1.0), InvalidInputError);
}

TEST_CASE("empirical survival of big samples tracks the family") {
  const Family families[] = {make_exponential(0.32), make_weibull(0.5, 1.5),
                             make_loglogistic(0.4, 2.0), make_lognormal(0.5, 1.2)};
  std::uint64_t seed = 40;
  for (const Family& f : families) {
    SimSpec spec;
    spec.family = f;
    spec.n = 20000;
    spec.seed = seed++;
    const Cohort cohort = simulate_cohort(spec);
    const KmEstimate km = kaplan_meier(build_event_table(cohort), 0.95);
    double sup = 0.0;
    for (const auto& p : km.curve.points) {
      sup = std::max(sup, std::fabs(p.value - survival(f, p.time)));
    }
    CHECK(sup < 0.02);

    // sample quantiles map back to their levels through S
    std::vector<double> durations;
    for (const auto& obs : cohort.observations) durations.push_back(obs.duration_hours);
    std::sort(durations.begin(), durations.end());
    for (double q = 0.1; q < 0.95; q += 0.1) {
      const double t_q = durations[static_cast<std::size_t>(q * (spec.n - 1))];
      CHECK(std::fabs(survival(f, t_q) - (1.0 - q)) < 0.01);
    }
  }
}
