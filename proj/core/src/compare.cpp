#include "churnkit/compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "churnkit/numerics.hpp"

namespace churnkit {

namespace {

struct PooledTime {
  double time = 0.0;
  int at_risk[2] = {0, 0};
  int events[2] = {0, 0};
};

// Pooled event-time bookkeeping for two cohorts, censoring ties at risk.
std::vector<PooledTime> pool_cohorts(const Cohort& control, const Cohort& test) {
  std::map<double, PooledTime> by_time;
  const Cohort* groups[2] = {&control, &test};
  for (int g = 0; g < 2; ++g) {
    for (const Observation& obs : groups[g]->observations) {
      if (!(obs.duration_hours >= 0.0) || !std::isfinite(obs.duration_hours)) {
        throw InvalidInputError("logrank: duration must be finite and >= 0");
      }
      if (!obs.censored) {
        PooledTime& slot = by_time[obs.duration_hours];
        slot.time = obs.duration_hours;
        ++slot.events[g];
      }
    }
  }
  std::vector<PooledTime> times;
  times.reserve(by_time.size());
  for (auto& [t, slot] : by_time) times.push_back(slot);
  for (int g = 0; g < 2; ++g) {
    std::vector<double> durations;
    durations.reserve(groups[g]->size());
    for (const Observation& obs : groups[g]->observations) {
      durations.push_back(obs.duration_hours);
    }
    std::sort(durations.begin(), durations.end());
    for (PooledTime& slot : times) {
      // at risk = observations with duration >= t (censoring ties included)
      const auto it = std::lower_bound(durations.begin(), durations.end(), slot.time);
      slot.at_risk[g] = static_cast<int>(durations.end() - it);
    }
  }
  return times;
}

struct ScorePieces {
  double score = 0.0;
  double variance = 0.0;
  int total_events = 0;
  std::vector<LogRankTerm> terms;
};

ScorePieces score_statistic(const Cohort& control, const Cohort& test,
                            const std::optional<WeightSpec>& weights, int stratum) {
  const std::vector<PooledTime> times = pool_cohorts(control, test);
  const double m = static_cast<double>(control.size() + test.size());

  ScorePieces pieces;
  double pooled_survival = 1.0;  // left-continuous: value just before t_i
  for (const PooledTime& slot : times) {
    const double n0 = slot.at_risk[0];
    const double n1 = slot.at_risk[1];
    const double n = n0 + n1;
    const double d = slot.events[0] + slot.events[1];
    pieces.total_events += slot.events[0] + slot.events[1];

    LogRankTerm term;
    term.time = slot.time;
    term.stratum = stratum;
    term.at_risk_control = slot.at_risk[0];
    term.at_risk_test = slot.at_risk[1];
    term.events_control = slot.events[0];
    term.events_test = slot.events[1];
    term.expected_control = n0 * d / n;
    term.variance_control =
        n > 1.0 ? n0 * n1 * d * (n - d) / (n * n * (n - 1.0)) : 0.0;
    term.weight = weights ? m * std::pow(pooled_survival, weights->rho) : 1.0;

    pieces.score += term.weight * (slot.events[0] - term.expected_control);
    pieces.variance += term.weight * term.weight * term.variance_control;
    pieces.terms.push_back(term);

    pooled_survival *= 1.0 - d / n;
  }
  return pieces;
}

LogRankResult finish(double score, double variance, std::vector<LogRankTerm> terms) {
  LogRankResult result;
  result.score = score;
  result.score_variance = variance;
  result.terms = std::move(terms);
  if (variance <= 0.0) {
    if (score != 0.0) {
      throw NumericalError("logrank: zero variance with a nonzero score statistic");
    }
    result.chi2 = 0.0;
  } else {
    result.chi2 = score * score / variance;
  }
  result.p_value = chi_square_1df_sf(result.chi2);
  if (result.p_value <= 0.0) {
    result.p_value = std::numeric_limits<double>::min();
    result.p_underflow = true;
  }
  return result;
}

}  // namespace

LogRankResult logrank(const Cohort& control, const Cohort& test) {
  if (control.observations.empty() || test.observations.empty()) {
    throw InvalidInputError("logrank: both cohorts must be non-empty");
  }
  ScorePieces pieces = score_statistic(control, test, std::nullopt, 0);
  if (pieces.total_events == 0) {
    throw DegenerateDataError("logrank: no events in either cohort");
  }
  return finish(pieces.score, pieces.variance, std::move(pieces.terms));
}

LogRankResult logrank(const Cohort& control, const Cohort& test, const WeightSpec& weights) {
  if (!(weights.rho >= 0.0) || !std::isfinite(weights.rho)) {
    throw InvalidInputError("logrank: rho must be finite and >= 0");
  }
  if (control.observations.empty() || test.observations.empty()) {
    throw InvalidInputError("logrank: both cohorts must be non-empty");
  }
  ScorePieces pieces = score_statistic(control, test, weights, 0);
  if (pieces.total_events == 0) {
    throw DegenerateDataError("logrank: no events in either cohort");
  }
  return finish(pieces.score, pieces.variance, std::move(pieces.terms));
}

LogRankResult stratified_logrank(const std::vector<std::pair<Cohort, Cohort>>& strata,
                                 const std::optional<WeightSpec>& weights) {
  if (weights && (!(weights->rho >= 0.0) || !std::isfinite(weights->rho))) {
    throw InvalidInputError("stratified_logrank: rho must be finite and >= 0");
  }
  double score = 0.0;
  double variance = 0.0;
  int total_events = 0;
  std::vector<LogRankTerm> terms;
  for (std::size_t g = 0; g < strata.size(); ++g) {
    ScorePieces pieces =
        score_statistic(strata[g].first, strata[g].second, weights, static_cast<int>(g));
    if (pieces.total_events == 0) continue;
    total_events += pieces.total_events;
    score += pieces.score;
    variance += pieces.variance;
    terms.insert(terms.end(), pieces.terms.begin(), pieces.terms.end());
  }
  if (total_events == 0) {
    throw DegenerateDataError("stratified_logrank: no events in any stratum");
  }
  return finish(score, variance, std::move(terms));
}

}  // namespace churnkit
