#ifndef CHURNKIT_COMPARE_HPP
#define CHURNKIT_COMPARE_HPP

#include <optional>
#include <utility>
#include <vector>

#include "churnkit/types.hpp"

namespace churnkit {

/// rho-weighted family: w_i = m * S_pooled(t_i-)^rho with the
/// left-continuous pooled Kaplan-Meier. rho = 0 keeps the constant factor
/// m; rho = 1 is the Peto-Peto/Prentice modification.
struct WeightSpec {
  double rho = 0.0;
};

/// Per-event-time bookkeeping of the test. With weights, score and
/// score_variance in LogRankResult apply weight and weight^2; the raw
/// pieces here let either weighting convention be recomputed.
struct LogRankTerm {
  double time = 0.0;
  int stratum = 0;
  int at_risk_control = 0;   // n_0i
  int at_risk_test = 0;      // n_1i
  int events_control = 0;    // d_0i
  int events_test = 0;       // d_1i
  double expected_control = 0.0;  // E[D_0i] = n_0i d_i / n_i
  double variance_control = 0.0;  // hypergeometric Var[D_0i]; 0 when n_i <= 1
  double weight = 1.0;
};

struct LogRankResult {
  double score = 0.0;           // U = sum w_i (d_0i - e_0i)
  double score_variance = 0.0;  // Var[U] = sum w_i^2 v_0i
  double chi2 = 0.0;
  double p_value = 1.0;
  bool p_underflow = false;  // true when the tail probability underflowed
  std::vector<LogRankTerm> terms;
};

/// Plain two-cohort log-rank test (all weights 1).
LogRankResult logrank(const Cohort& control, const Cohort& test);

/// rho-weighted variant.
LogRankResult logrank(const Cohort& control, const Cohort& test, const WeightSpec& weights);

/// Stratified test: (sum_g U_g)^2 / sum_g Var[U_g]. Strata without events
/// contribute nothing.
LogRankResult stratified_logrank(const std::vector<std::pair<Cohort, Cohort>>& strata,
                                 const std::optional<WeightSpec>& weights = std::nullopt);

}  // namespace churnkit

#endif  // CHURNKIT_COMPARE_HPP
