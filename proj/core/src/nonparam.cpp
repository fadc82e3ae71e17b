#include "churnkit/nonparam.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "churnkit/numerics.hpp"

namespace churnkit {

namespace {

void check_table(const std::vector<EventTableRow>& table) {
  int prev_at_risk = std::numeric_limits<int>::max();
  double prev_time = -std::numeric_limits<double>::infinity();
  for (const EventTableRow& row : table) {
    if (row.events < 1 || row.events > row.at_risk || row.time < 0.0 ||
        row.time <= prev_time || row.at_risk > prev_at_risk) {
      throw InvalidInputError("invalid event table row at t=" + std::to_string(row.time));
    }
    prev_at_risk = row.at_risk;
    prev_time = row.time;
  }
}

}  // namespace

KmEstimate kaplan_meier(const std::vector<EventTableRow>& table, double conf_level) {
  if (!(conf_level > 0.0 && conf_level < 1.0)) {
    throw InvalidInputError("kaplan_meier: conf_level must be in (0,1), got " +
                            std::to_string(conf_level));
  }
  check_table(table);
  const double z = z_for_conf_level(conf_level);

  KmEstimate km;
  km.conf_level = conf_level;
  km.curve.kind = StepCurve::Kind::Survival;

  double survival = 1.0;
  double var_sum = 0.0;       // running sum of d_i / (n_i (n_i - d_i))
  bool var_defined = true;    // false from the first n_i = d_i row onward
  for (const EventTableRow& row : table) {
    const double n = row.at_risk;
    const double d = row.events;
    survival *= 1.0 - d / n;
    if (n == d) {
      var_defined = false;  // survival hits zero; Greenwood term divides by zero
    } else if (var_defined) {
      var_sum += d / (n * (n - d));
    }

    StepCurve::Point point;
    point.time = row.time;
    point.value = survival;
    if (var_defined && survival > 0.0 && survival < 1.0) {
      km.greenwood_var.push_back(survival * survival * var_sum);
      const double log_s = std::log(survival);
      const double var_g = var_sum / (log_s * log_s);
      km.loglog_var.push_back(var_g);
      const double g = std::log(-log_s);
      const double half = z * std::sqrt(var_g);
      // g(u) decreases in u, so +half gives the lower survival bound.
      point.ci_lower = std::exp(-std::exp(g + half));
      point.ci_upper = std::exp(-std::exp(g - half));
    } else {
      km.greenwood_var.push_back(std::nullopt);
      km.loglog_var.push_back(std::nullopt);
    }
    km.curve.points.push_back(point);
  }
  if (!table.empty()) {
    const EventTableRow& last = table.back();
    km.improper = last.at_risk > last.events;
  }
  return km;
}

NaEstimate nelson_aalen(const std::vector<EventTableRow>& table) {
  check_table(table);
  NaEstimate na;
  na.curve.kind = StepCurve::Kind::CumulativeHazard;
  double cum = 0.0;
  for (const EventTableRow& row : table) {
    cum += static_cast<double>(row.events) / row.at_risk;
    na.curve.points.push_back({row.time, cum, std::nullopt, std::nullopt});
  }
  return na;
}

StepCurve km_to_cumhaz(const KmEstimate& km) {
  StepCurve out;
  out.kind = StepCurve::Kind::CumulativeHazard;
  for (const StepCurve::Point& p : km.curve.points) {
    const double h = p.value > 0.0 ? -std::log(p.value)
                                   : std::numeric_limits<double>::infinity();
    out.points.push_back({p.time, h, std::nullopt, std::nullopt});
  }
  return out;
}

StepCurve na_to_survival(const NaEstimate& na) {
  StepCurve out;
  out.kind = StepCurve::Kind::Survival;
  for (const StepCurve::Point& p : na.curve.points) {
    out.points.push_back({p.time, std::exp(-p.value), std::nullopt, std::nullopt});
  }
  return out;
}

}  // namespace churnkit
