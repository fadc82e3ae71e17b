#include "churnkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "churnkit/numerics.hpp"

namespace churnkit {

MeanEstimate mean_auc(const std::vector<EventTableRow>& table, const KmEstimate& km,
                      double conf_level) {
  const double trunc = table.empty() ? 0.0 : table.back().time;
  return mean_auc(table, km, conf_level, trunc);
}

MeanEstimate mean_auc(const std::vector<EventTableRow>& table, const KmEstimate& km,
                      double conf_level, double truncation_time) {
  if (table.empty()) {
    throw DegenerateDataError("mean_auc: empty event table");
  }
  if (km.curve.points.size() != table.size()) {
    throw InvalidInputError("mean_auc: estimate does not match the event table");
  }
  const double z = z_for_conf_level(conf_level);

  MeanEstimate out;
  out.conf_level = conf_level;
  out.restricted = km.improper;

  double prev_time = 0.0;
  double prev_survival = 1.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    out.per_event_area.push_back(prev_survival * (table[i].time - prev_time));
    prev_time = table[i].time;
    prev_survival = km.curve.points[i].value;
  }
  // Tail rectangle up to the truncation horizon when the curve stays
  // above zero there.
  if (truncation_time > prev_time && prev_survival > 0.0) {
    out.per_event_area.push_back(prev_survival * (truncation_time - prev_time));
  }

  double total = 0.0;
  for (double a : out.per_event_area) total += a;
  out.mean = total;

  out.tail_area.resize(out.per_event_area.size());
  double tail = 0.0;
  for (std::size_t i = out.per_event_area.size(); i-- > 0;) {
    out.tail_area[i] = tail;
    tail += out.per_event_area[i];
  }

  // Var[A] = sum B_i^2 / (n_i (n_i - 1)) over event rows with n_i > 1.
  bool any_term = false;
  double var = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double n = table[i].at_risk;
    if (n <= 1.0) continue;
    var += out.tail_area[i] * out.tail_area[i] / (n * (n - 1.0));
    any_term = true;
  }
  if (any_term) {
    out.variance = var;
    const double half = z * std::sqrt(var);
    out.ci_lower = out.mean - half;
    out.ci_upper = out.mean + half;
  }
  return out;
}

namespace {

// Standardized log-log statistic (g(S(t)) - g(1-p)) / se at one event row;
// absent where the transform or the variance is undefined.
std::optional<double> loglog_statistic(const KmEstimate& km, std::size_t row, double q) {
  const double s = km.curve.points[row].value;
  if (!(s > 0.0 && s < 1.0) || !km.loglog_var[row].has_value()) return std::nullopt;
  const double var = *km.loglog_var[row];
  if (!(var > 0.0)) return std::nullopt;
  const double g_s = std::log(-std::log(s));
  const double g_q = std::log(-std::log(q));
  return (g_s - g_q) / std::sqrt(var);
}

}  // namespace

QuantileEstimate quantile(const KmEstimate& km, double p, double conf_level) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw InvalidInputError("quantile: p must be in (0,1], got " + std::to_string(p));
  }
  const double z = z_for_conf_level(conf_level);
  const double q = 1.0 - p;

  QuantileEstimate out;
  out.p = p;
  const auto& points = km.curve.points;
  for (const StepCurve::Point& point : points) {
    if (point.value <= q) {
      out.estimate = point.time;
      break;
    }
  }
  if (p == 1.0) {
    // S must actually reach zero; the transform-based CI has no meaning here.
    if (!points.empty() && points.back().value > 0.0) out.estimate.reset();
    return out;
  }

  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::optional<double> stat = loglog_statistic(km, i, q);
    if (!stat) continue;
    // Lower bound: first time the lower confidence limit dips to q,
    // i.e. the statistic enters [-z, inf).
    if (!out.ci_lower && *stat >= -z) out.ci_lower = points[i].time;
    // Upper bound: first time the upper confidence limit dips to q,
    // i.e. the statistic leaves (-inf, z].
    if (!out.ci_upper && *stat > z) out.ci_upper = points[i].time;
  }
  return out;
}

std::vector<QuantileEstimate> quantile_profile(const KmEstimate& km,
                                               const std::vector<double>& levels,
                                               double conf_level) {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] > 0.0 && levels[i] <= 1.0)) {
      throw InvalidInputError("quantile_profile: levels must lie in (0,1]");
    }
    if (i > 0 && !(levels[i] > levels[i - 1])) {
      throw InvalidInputError("quantile_profile: levels must be ascending");
    }
  }
  std::vector<QuantileEstimate> out;
  out.reserve(levels.size());
  for (double p : levels) {
    out.push_back(quantile(km, p, conf_level));
  }
  return out;
}

}  // namespace churnkit
