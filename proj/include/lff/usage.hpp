#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace lff {

struct UsageEvent {
  std::string timestamp; // 2026-01-31T09:15:02.125Z
  std::string sessionId;
  std::string action; // check | solve | diagnose
  std::string fullText;
  std::string outcomeKind;
  long long durationMs = 0;

  friend bool operator==(const UsageEvent &, const UsageEvent &) = default;
};

/// Current UTC time with millisecond precision.
std::string utc_timestamp_now();

/// Milliseconds since the epoch; throws std::invalid_argument on a
/// malformed timestamp.
long long parse_utc_timestamp(const std::string &ts);

std::string usage_event_to_line(const UsageEvent &e);
/// Throws std::runtime_error on malformed JSON or missing fields.
UsageEvent usage_event_from_line(const std::string &line);

/// Append-only JSON-lines log. Safe to share between threads.
class UsageLog {
public:
  explicit UsageLog(std::filesystem::path path);
  void append(const UsageEvent &e);
  const std::filesystem::path &path() const { return path_; }

private:
  std::filesystem::path path_;
  std::mutex mu_;
  std::ofstream out_;
};

/// Every event in a log file, in file order. Blank lines are skipped; a
/// malformed line throws std::runtime_error naming its line number.
std::vector<UsageEvent> read_usage_log(const std::filesystem::path &path);

/// Event counts per UTC date (YYYY-MM-DD).
std::map<std::string, int> counts_by_day(const std::vector<UsageEvent> &events);
std::string by_day_csv(const std::vector<UsageEvent> &events);

struct IntervalRow {
  std::string timestamp;
  double intervalSecs = 0;
  std::string action;
  std::string prevAction;
};

/// Gaps between consecutive runs of one session, ordered by time. The first
/// run of the session has no predecessor and produces no row.
std::vector<IntervalRow> session_intervals(const std::vector<UsageEvent> &events,
                                           const std::string &sessionId);
std::string intervals_csv(const std::vector<UsageEvent> &events, const std::string &sessionId);

} // namespace lff
