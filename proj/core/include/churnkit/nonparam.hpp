#ifndef CHURNKIT_NONPARAM_HPP
#define CHURNKIT_NONPARAM_HPP

#include <optional>
#include <vector>

#include "churnkit/types.hpp"

namespace churnkit {

/// Kaplan-Meier product-limit estimate with Greenwood variances and
/// log-log transformed confidence bounds.
///
/// Per event row k the survival value is prod_{i<=k} (1 - d_i/n_i); the
/// Greenwood variance is S^2 * sum d_i/(n_i(n_i-d_i)) and the variance of
/// g(S) = log(-log S) is sum d_i/(n_i(n_i-d_i)) / (log S)^2. Confidence
/// bounds are exp(-exp(g(S) -+ z*se)). Bounds, greenwood_var and
/// loglog_var are absent where the transform or the variance is undefined
/// (S = 0, or a row with n_i = d_i and everything after it).
struct KmEstimate {
  StepCurve curve;  // kind = Survival, one point per event row
  std::vector<std::optional<double>> greenwood_var;
  std::vector<std::optional<double>> loglog_var;
  bool improper = false;  // someone was still at risk after the last event
  double conf_level = 0.95;
};

/// Nelson-Aalen cumulative hazard: sum_{t_i <= t} d_i/n_i per event row.
struct NaEstimate {
  StepCurve curve;  // kind = CumulativeHazard
};

KmEstimate kaplan_meier(const std::vector<EventTableRow>& table, double conf_level);

NaEstimate nelson_aalen(const std::vector<EventTableRow>& table);

/// H(t) = -log S(t); a final survival step of zero maps to +infinity.
StepCurve km_to_cumhaz(const KmEstimate& km);

/// S(t) = exp(-H(t)).
StepCurve na_to_survival(const NaEstimate& na);

}  // namespace churnkit

#endif  // CHURNKIT_NONPARAM_HPP
