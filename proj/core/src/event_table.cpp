#include "churnkit/event_table.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace churnkit {

std::vector<EventTableRow> build_event_table(const Cohort& cohort) {
  for (const Observation& obs : cohort.observations) {
    if (!(obs.duration_hours >= 0.0) || !std::isfinite(obs.duration_hours)) {
      throw InvalidInputError("build_event_table: duration must be finite and >= 0, got " +
                              std::to_string(obs.duration_hours));
    }
  }

  std::vector<Observation> sorted = cohort.observations;
  std::sort(sorted.begin(), sorted.end(),
            [](const Observation& a, const Observation& b) {
              return a.duration_hours < b.duration_hours;
            });

  std::vector<EventTableRow> table;
  const int m = static_cast<int>(sorted.size());
  int consumed = 0;        // observations with duration < current row time
  int pending_censor = 0;  // censorings since the previous event row
  std::size_t i = 0;
  while (i < sorted.size()) {
    const double t = sorted[i].duration_hours;
    int events = 0;
    int censored_here = 0;
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].duration_hours == t) {
      if (sorted[j].censored) {
        ++censored_here;
      } else {
        ++events;
      }
      ++j;
    }
    if (events > 0) {
      EventTableRow row;
      row.time = t;
      row.at_risk = m - consumed;
      row.events = events;
      // Censorings tied with an event time are still at risk for that
      // event; they leave the risk set afterwards and count in the next
      // row's gap.  This keeps n_k = n_{k-1} - d_{k-1} - censored_in_gap_k.
      row.censored_in_gap = pending_censor;
      table.push_back(row);
      pending_censor = censored_here;
    } else {
      pending_censor += censored_here;
    }
    consumed += static_cast<int>(j - i);
    i = j;
  }
  return table;
}

std::vector<DiscreteStep> discrete_survival_from_hazard(
    int initial_count, const std::vector<double>& hazards) {
  if (initial_count < 0) {
    throw InvalidInputError("discrete_survival_from_hazard: initial_count must be >= 0");
  }
  for (double h : hazards) {
    if (!(h >= 0.0 && h <= 1.0)) {
      throw InvalidInputError("discrete_survival_from_hazard: hazard outside [0,1]: " +
                              std::to_string(h));
    }
  }
  std::vector<DiscreteStep> steps;
  steps.reserve(hazards.size());
  double survivors = static_cast<double>(initial_count);
  for (double h : hazards) {
    DiscreteStep step;
    step.failures = survivors * h;
    survivors *= (1.0 - h);
    step.survivors = survivors;
    steps.push_back(step);
  }
  return steps;
}

}  // namespace churnkit
