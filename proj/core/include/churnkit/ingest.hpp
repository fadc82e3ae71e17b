#ifndef CHURNKIT_INGEST_HPP
#define CHURNKIT_INGEST_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "churnkit/types.hpp"

namespace churnkit {

/// One logged play session. Timestamps are UTC epoch seconds.
struct SessionRecord {
  std::string player_id;
  std::int64_t start = 0;
  std::int64_t end = 0;
};

/// Knobs of the churn-imputation rule and of duration storage.
struct IngestConfig {
  std::int64_t collection_cutoff = 0;              // epoch seconds; >= every session end
  std::int64_t inactivity_window_s = 14 * 86400;   // gap below this means "maybe active"
  double min_total_playtime_hours = 0.0;           // players at or below are dropped
  std::int64_t time_resolution_s = 1;              // durations snap to this grid
};

/// Parses "YYYY-MM-DDTHH:MM:SS" with a "Z" or "+-HH:MM" offset into UTC
/// epoch seconds. Throws InvalidInputError on malformed input.
std::int64_t parse_iso8601(const std::string& text);

/// Formats UTC epoch seconds as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(std::int64_t epoch_seconds);

/// Total playtime per player with censoring imputed from inactivity:
/// a player whose last activity is within the inactivity window of the
/// cutoff is censored. Overlapping sessions of one player are merged
/// before summing. Players with total playtime <= min_total_playtime are
/// excluded. Output is sorted by player id.
Cohort aggregate_sessions(const std::vector<SessionRecord>& records, const IngestConfig& config);

/// Snaps an hour value to the configured resolution.
double quantize_hours(double hours, std::int64_t resolution_s);

enum class FileFormat { Durations, Sessions };

/// Reads the durations CSV (`player_id,duration_hours,censored` with
/// censored in {0,1}); extra columns are permitted and ignored. The cohort
/// label is the file stem. Durations snap to the resolution.
Cohort read_durations(const std::string& path, std::int64_t time_resolution_s = 1);

/// Reads the sessions CSV (`player_id,start_iso8601,end_iso8601`).
std::vector<SessionRecord> read_sessions(const std::string& path);

/// Reads either format into a cohort; sessions are aggregated per config.
Cohort read_cohort(const std::string& path, FileFormat format, const IngestConfig& config);

/// Splits a durations CSV into per-stratum cohorts keyed by the values of
/// the named extra column.
std::map<std::string, Cohort> read_stratified_durations(const std::string& path,
                                                        const std::string& strata_column,
                                                        std::int64_t time_resolution_s = 1);

/// Writes the durations CSV. Hours carry up to six fractional digits,
/// which round-trips exactly at one-second resolution.
void write_durations(const Cohort& cohort, const std::string& path);
void write_durations(const Cohort& cohort, std::ostream& out);

}  // namespace churnkit

#endif  // CHURNKIT_INGEST_HPP
