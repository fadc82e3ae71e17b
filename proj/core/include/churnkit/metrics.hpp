#ifndef CHURNKIT_METRICS_HPP
#define CHURNKIT_METRICS_HPP

#include <optional>
#include <vector>

#include "churnkit/nonparam.hpp"
#include "churnkit/types.hpp"

namespace churnkit {

/// Mean duration as the area under the Kaplan-Meier curve.
///
/// per_event_area holds A_i = S_{i-1} (t_i - t_{i-1}); tail_area holds
/// B_i = sum_{k>i} A_k, so the mean equals per_event_area summed and also
/// tail_area before the first event. variance = sum B_i^2 / (n_i (n_i-1))
/// over event rows with n_i > 1; absent when no row qualifies. When the
/// curve is improper the mean is restricted to the truncation horizon and
/// per_event_area carries one trailing entry for the censored tail
/// rectangle (no event row of its own, never part of the variance).
struct MeanEstimate {
  double mean = 0.0;
  std::optional<double> variance;
  std::optional<double> ci_lower;
  std::optional<double> ci_upper;
  bool restricted = false;
  std::vector<double> per_event_area;
  std::vector<double> tail_area;  // tail_area[i] = area remaining after entry i
  double conf_level = 0.95;
};

/// Area under the KM curve built from `table`/`km`. Without an explicit
/// truncation time the area runs to the last event time; pass the largest
/// observed duration (censored or not) to truncate there instead.
MeanEstimate mean_auc(const std::vector<EventTableRow>& table, const KmEstimate& km,
                      double conf_level);
MeanEstimate mean_auc(const std::vector<EventTableRow>& table, const KmEstimate& km,
                      double conf_level, double truncation_time);

/// A survival-curve quantile: the earliest event time where S drops to
/// 1-p or below. CI bounds are the first event times where the
/// corresponding log-log confidence limit crosses 1-p; an absent bound
/// means that side is open-ended, an absent estimate means the curve never
/// reached 1-p.
struct QuantileEstimate {
  double p = 0.5;
  std::optional<double> estimate;
  std::optional<double> ci_lower;
  std::optional<double> ci_upper;
};

QuantileEstimate quantile(const KmEstimate& km, double p, double conf_level);

/// Quantiles at several levels; levels must be ascending, inside (0,1].
/// p = 1 resolves to the last event time only when the curve reaches zero.
std::vector<QuantileEstimate> quantile_profile(const KmEstimate& km,
                                               const std::vector<double>& levels,
                                               double conf_level);

}  // namespace churnkit

#endif  // CHURNKIT_METRICS_HPP
