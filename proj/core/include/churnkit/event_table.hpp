#ifndef CHURNKIT_EVENT_TABLE_HPP
#define CHURNKIT_EVENT_TABLE_HPP

#include <vector>

#include "churnkit/types.hpp"

namespace churnkit {

/// Builds the risk-set/event-count table from raw observations: one row per
/// distinct uncensored event time, ascending. at_risk counts every
/// observation with duration >= the row time, so a censoring tied with an
/// event time is still at risk for that event. Censorings enter only
/// through risk-set reduction; censorings after the last event time appear
/// in no row.
std::vector<EventTableRow> build_event_table(const Cohort& cohort);

/// One step of a discrete survival process.
struct DiscreteStep {
  double survivors = 0.0;  // initial_count * prod_{u<=k} (1 - h(u))
  double failures = 0.0;   // survivors_{k-1} * h(k)
};

/// Applies per-step hazards h(1), h(2), ... to an initial population count.
/// Counts are returned as reals, no rounding.
std::vector<DiscreteStep> discrete_survival_from_hazard(
    int initial_count, const std::vector<double>& hazards);

}  // namespace churnkit

#endif  // CHURNKIT_EVENT_TABLE_HPP
