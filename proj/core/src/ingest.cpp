#include "churnkit/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace churnkit {

namespace {

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t year = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = year + (m <= 2);
}

int two_digits(const std::string& s, std::size_t pos) {
  if (pos + 1 >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])) ||
      !std::isdigit(static_cast<unsigned char>(s[pos + 1]))) {
    return -1;
  }
  return (s[pos] - '0') * 10 + (s[pos + 1] - '0');
}

[[noreturn]] void bad_timestamp(const std::string& text) {
  throw InvalidInputError("malformed ISO-8601 timestamp: '" + text + "'");
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(field);
  return fields;
}

[[noreturn]] void bad_row(const std::string& path, std::size_t line_no, const std::string& why) {
  throw IoError(path + ":" + std::to_string(line_no) + ": " + why);
}

double parse_double(const std::string& text, bool& ok) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  ok = end == begin + text.size() && !text.empty();
  return v;
}

std::string path_stem(const std::string& path) {
  const std::size_t slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  const std::size_t dot = name.find_last_of('.');
  if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  return name;
}

}  // namespace

std::int64_t parse_iso8601(const std::string& text) {
  // YYYY-MM-DDTHH:MM:SS followed by Z or +-HH:MM (or +-HHMM).
  if (text.size() < 20) bad_timestamp(text);
  for (int i = 0; i < 4; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) bad_timestamp(text);
  }
  const int year = std::stoi(text.substr(0, 4));
  if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
      text[13] != ':' || text[16] != ':') {
    bad_timestamp(text);
  }
  const int month = two_digits(text, 5);
  const int day = two_digits(text, 8);
  const int hour = two_digits(text, 11);
  const int minute = two_digits(text, 14);
  const int second = two_digits(text, 17);
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour < 0 || hour > 23 ||
      minute < 0 || minute > 59 || second < 0 || second > 60) {
    bad_timestamp(text);
  }

  std::int64_t offset = 0;
  const char tz = text[19];
  if (tz == 'Z') {
    if (text.size() != 20) bad_timestamp(text);
  } else if (tz == '+' || tz == '-') {
    int off_h = two_digits(text, 20);
    int off_m = 0;
    if (text.size() == 25 && text[22] == ':') {
      off_m = two_digits(text, 23);  // +HH:MM
    } else if (text.size() == 24) {
      off_m = two_digits(text, 22);  // +HHMM
    } else if (text.size() != 22) {  // +HH
      bad_timestamp(text);
    }
    if (off_h < 0 || off_h > 23 || off_m < 0 || off_m > 59) bad_timestamp(text);
    offset = (tz == '+' ? 1 : -1) * (off_h * 3600LL + off_m * 60LL);
  } else {
    bad_timestamp(text);
  }

  const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                            static_cast<unsigned>(day));
  return days * 86400 + hour * 3600LL + minute * 60LL + second - offset;
}

std::string format_iso8601(std::int64_t epoch_seconds) {
  std::int64_t days = epoch_seconds / 86400;
  std::int64_t rem = epoch_seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  std::int64_t year;
  unsigned month, day;
  civil_from_days(days, year, month, day);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                static_cast<long long>(year), month, day,
                static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                static_cast<long long>(rem % 60));
  return buf;
}

double quantize_hours(double hours, std::int64_t resolution_s) {
  if (resolution_s <= 0) {
    throw InvalidInputError("time resolution must be positive");
  }
  const double ticks = std::round(hours * 3600.0 / static_cast<double>(resolution_s));
  return ticks * static_cast<double>(resolution_s) / 3600.0;
}

Cohort aggregate_sessions(const std::vector<SessionRecord>& records, const IngestConfig& config) {
  if (config.inactivity_window_s <= 0) {
    throw InvalidInputError("aggregate_sessions: inactivity window must be positive");
  }
  if (config.time_resolution_s <= 0) {
    throw InvalidInputError("aggregate_sessions: time resolution must be positive");
  }
  for (const SessionRecord& rec : records) {
    if (rec.player_id.empty()) {
      throw InvalidInputError("aggregate_sessions: empty player id");
    }
    if (rec.end < rec.start) {
      throw InvalidInputError("aggregate_sessions: session for '" + rec.player_id +
                              "' ends before it starts (" + format_iso8601(rec.end) + " < " +
                              format_iso8601(rec.start) + ")");
    }
    if (rec.end > config.collection_cutoff) {
      throw InvalidInputError("aggregate_sessions: session for '" + rec.player_id +
                              "' ends after the collection cutoff (" + format_iso8601(rec.end) +
                              ")");
    }
  }

  std::map<std::string, std::vector<std::pair<std::int64_t, std::int64_t>>> per_player;
  for (const SessionRecord& rec : records) {
    per_player[rec.player_id].push_back({rec.start, rec.end});
  }

  Cohort cohort;
  cohort.label = "sessions";
  for (auto& [player, intervals] : per_player) {
    std::sort(intervals.begin(), intervals.end());
    // Union of intervals: overlap is a logging artifact, not extra play.
    std::int64_t total = 0;
    std::int64_t last_end = intervals.front().second;
    std::int64_t cur_start = intervals.front().first;
    std::int64_t cur_end = intervals.front().second;
    for (std::size_t i = 1; i < intervals.size(); ++i) {
      last_end = std::max(last_end, intervals[i].second);
      if (intervals[i].first <= cur_end) {
        cur_end = std::max(cur_end, intervals[i].second);
      } else {
        total += cur_end - cur_start;
        cur_start = intervals[i].first;
        cur_end = intervals[i].second;
      }
    }
    total += cur_end - cur_start;

    const double hours =
        quantize_hours(static_cast<double>(total) / 3600.0, config.time_resolution_s);
    if (hours <= config.min_total_playtime_hours) continue;
    const bool censored = (config.collection_cutoff - last_end) < config.inactivity_window_s;
    cohort.observations.push_back({hours, censored});
  }
  return cohort;
}

Cohort read_durations(const std::string& path, std::int64_t time_resolution_s) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path + "'");
  }
  Cohort cohort;
  cohort.label = path_stem(path);
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (!saw_header) {
      const std::vector<std::string> header = split_csv(line);
      if (header.size() < 3 || header[0] != "player_id" || header[1] != "duration_hours" ||
          header[2] != "censored") {
        bad_row(path, line_no, "expected header 'player_id,duration_hours,censored'");
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() < 3) bad_row(path, line_no, "expected at least 3 fields");
    bool ok = false;
    const double hours = parse_double(fields[1], ok);
    if (!ok || !std::isfinite(hours) || hours < 0.0) {
      bad_row(path, line_no, "bad duration '" + fields[1] + "'");
    }
    bool censored = false;
    if (fields[2] == "0") {
      censored = false;
    } else if (fields[2] == "1") {
      censored = true;
    } else {
      bad_row(path, line_no, "unknown censor flag '" + fields[2] + "' (want 0 or 1)");
    }
    cohort.observations.push_back({quantize_hours(hours, time_resolution_s), censored});
  }
  if (!saw_header) {
    bad_row(path, 1, "missing header row");
  }
  return cohort;
}

std::vector<SessionRecord> read_sessions(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path + "'");
  }
  std::vector<SessionRecord> records;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (!saw_header) {
      const std::vector<std::string> header = split_csv(line);
      if (header.size() != 3 || header[0] != "player_id" || header[1] != "start_iso8601" ||
          header[2] != "end_iso8601") {
        bad_row(path, line_no, "expected header 'player_id,start_iso8601,end_iso8601'");
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != 3) bad_row(path, line_no, "expected 3 fields");
    if (fields[0].empty()) bad_row(path, line_no, "empty player id");
    SessionRecord rec;
    rec.player_id = fields[0];
    try {
      rec.start = parse_iso8601(fields[1]);
      rec.end = parse_iso8601(fields[2]);
    } catch (const InvalidInputError& e) {
      bad_row(path, line_no, e.what());
    }
    records.push_back(rec);
  }
  if (!saw_header) {
    bad_row(path, 1, "missing header row");
  }
  return records;
}

Cohort read_cohort(const std::string& path, FileFormat format, const IngestConfig& config) {
  if (format == FileFormat::Durations) {
    return read_durations(path, config.time_resolution_s);
  }
  IngestConfig cfg = config;
  const std::vector<SessionRecord> records = read_sessions(path);
  if (cfg.collection_cutoff == 0) {
    for (const SessionRecord& rec : records) {
      cfg.collection_cutoff = std::max(cfg.collection_cutoff, rec.end);
    }
  }
  Cohort cohort = aggregate_sessions(records, cfg);
  cohort.label = path_stem(path);
  return cohort;
}

std::map<std::string, Cohort> read_stratified_durations(const std::string& path,
                                                        const std::string& strata_column,
                                                        std::int64_t time_resolution_s) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path + "'");
  }
  std::map<std::string, Cohort> strata;
  std::string line;
  std::size_t line_no = 0;
  std::size_t strata_index = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (!saw_header) {
      const std::vector<std::string> header = split_csv(line);
      if (header.size() < 3 || header[0] != "player_id" || header[1] != "duration_hours" ||
          header[2] != "censored") {
        bad_row(path, line_no, "expected header 'player_id,duration_hours,censored,...'");
      }
      const auto it = std::find(header.begin(), header.end(), strata_column);
      if (it == header.end() || it - header.begin() < 3) {
        bad_row(path, line_no, "no strata column '" + strata_column + "' in header");
      }
      strata_index = static_cast<std::size_t>(it - header.begin());
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() <= strata_index) bad_row(path, line_no, "missing strata field");
    bool ok = false;
    const double hours = parse_double(fields[1], ok);
    if (!ok || !std::isfinite(hours) || hours < 0.0) {
      bad_row(path, line_no, "bad duration '" + fields[1] + "'");
    }
    bool censored = false;
    if (fields[2] == "0") {
      censored = false;
    } else if (fields[2] == "1") {
      censored = true;
    } else {
      bad_row(path, line_no, "unknown censor flag '" + fields[2] + "' (want 0 or 1)");
    }
    Cohort& cohort = strata[fields[strata_index]];
    cohort.label = fields[strata_index];
    cohort.observations.push_back({quantize_hours(hours, time_resolution_s), censored});
  }
  if (!saw_header) {
    bad_row(path, 1, "missing header row");
  }
  return strata;
}

namespace {

std::string format_hours(double hours) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", hours);
  std::string text = buf;
  while (text.find('.') != std::string::npos && (text.back() == '0')) text.pop_back();
  if (!text.empty() && text.back() == '.') text.pop_back();
  return text;
}

}  // namespace

void write_durations(const Cohort& cohort, std::ostream& out) {
  out << "player_id,duration_hours,censored\n";
  std::size_t i = 0;
  for (const Observation& obs : cohort.observations) {
    out << "p" << i++ << "," << format_hours(obs.duration_hours) << ","
        << (obs.censored ? 1 : 0) << "\n";
  }
}

void write_durations(const Cohort& cohort, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write '" + path + "'");
  }
  write_durations(cohort, out);
  if (!out.good()) {
    throw IoError("write failed for '" + path + "'");
  }
}

}  // namespace churnkit
