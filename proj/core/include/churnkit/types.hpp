#ifndef CHURNKIT_TYPES_HPP
#define CHURNKIT_TYPES_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace churnkit {

/// Raised when an argument violates a documented precondition
/// (negative duration, hazard outside [0,1], bad confidence level, ...).
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when the data cannot support the requested estimate
/// (no events, zero time at risk, empty table).
class DegenerateDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised on file problems: missing file, unwritable path, malformed row.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One subject: total duration in hours plus right-censoring indicator.
/// censored == true means the event was not observed and the duration is
/// a lower bound on the true value.
struct Observation {
  double duration_hours = 0.0;
  bool censored = false;
};

/// A labeled collection of observations; the unit of every analysis.
struct Cohort {
  std::string label;
  std::vector<Observation> observations;

  std::size_t size() const { return observations.size(); }
};

/// One row of the event table: a distinct uncensored event time with its
/// risk set. A censoring tied with an event time is still at risk for that
/// event and leaves the risk set afterwards, so censored_in_gap counts
/// censorings in [previous event time, this time) and
/// at_risk_k = at_risk_{k-1} - events_{k-1} - censored_in_gap_k holds.
struct EventTableRow {
  double time = 0.0;
  int at_risk = 0;
  int events = 0;
  int censored_in_gap = 0;
};

/// Right-continuous piecewise-constant estimate with optional pointwise
/// confidence bounds. Survival curves start at 1 before the first point;
/// cumulative-hazard curves start at 0.
struct StepCurve {
  enum class Kind { Survival, CumulativeHazard };

  struct Point {
    double time = 0.0;
    double value = 0.0;
    std::optional<double> ci_lower;
    std::optional<double> ci_upper;
  };

  Kind kind = Kind::Survival;
  std::vector<Point> points;

  bool empty() const { return points.empty(); }
};

}  // namespace churnkit

#endif  // CHURNKIT_TYPES_HPP
