#include "lff/usage.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace lff {

using Json = nlohmann::json;

std::string utc_timestamp_now() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count();
  const std::time_t secs = static_cast<std::time_t>(ms / 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms % 1000));
  return out;
}

long long parse_utc_timestamp(const std::string &ts) {
  std::tm tm{};
  std::istringstream in(ts);
  in >> std::get_time(&tm, "%Y-%m-%dT%H:%M:%S");
  if (in.fail())
    throw std::invalid_argument("malformed timestamp: " + ts);
  int ms = 0;
  std::string rest;
  std::getline(in, rest);
  if (!rest.empty() && rest[0] == '.') {
    std::size_t i = 1;
    int digits = 0;
    while (i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i]))) {
      if (digits < 3)
        ms = ms * 10 + (rest[i] - '0');
      ++digits;
      ++i;
    }
    if (digits == 0)
      throw std::invalid_argument("malformed timestamp: " + ts);
    for (; digits < 3; ++digits)
      ms *= 10;
    rest = rest.substr(i);
  }
  if (rest != "Z")
    throw std::invalid_argument("malformed timestamp (expected UTC 'Z'): " + ts);
  return static_cast<long long>(timegm(&tm)) * 1000 + ms;
}

std::string usage_event_to_line(const UsageEvent &e) {
  Json j{{"timestamp", e.timestamp},   {"sessionId", e.sessionId},
         {"action", e.action},         {"fullText", e.fullText},
         {"outcomeKind", e.outcomeKind}, {"durationMs", e.durationMs}};
  return j.dump(-1, ' ', false, Json::error_handler_t::replace);
}

UsageEvent usage_event_from_line(const std::string &line) {
  UsageEvent e;
  try {
    const Json j = Json::parse(line);
    e.timestamp = j.at("timestamp").get<std::string>();
    e.sessionId = j.at("sessionId").get<std::string>();
    e.action = j.at("action").get<std::string>();
    e.fullText = j.value("fullText", std::string());
    e.outcomeKind = j.value("outcomeKind", std::string());
    e.durationMs = j.value("durationMs", 0LL);
    parse_utc_timestamp(e.timestamp);
  } catch (const Json::exception &x) {
    throw std::runtime_error(x.what());
  } catch (const std::invalid_argument &x) {
    throw std::runtime_error(x.what());
  }
  return e;
}

UsageLog::UsageLog(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.has_parent_path())
    std::filesystem::create_directories(path_.parent_path());
  out_.open(path_, std::ios::app | std::ios::binary);
  if (!out_)
    throw std::runtime_error("cannot open usage log " + path_.string());
}

void UsageLog::append(const UsageEvent &e) {
  const std::string line = usage_event_to_line(e) + '\n';
  std::lock_guard lock(mu_);
  out_ << line;
  out_.flush();
}

std::vector<UsageEvent> read_usage_log(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot read " + path.string());
  std::vector<UsageEvent> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    try {
      out.push_back(usage_event_from_line(line));
    } catch (const std::exception &e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

std::map<std::string, int> counts_by_day(const std::vector<UsageEvent> &events) {
  std::map<std::string, int> out;
  for (const auto &e : events)
    ++out[e.timestamp.substr(0, 10)];
  return out;
}

std::string by_day_csv(const std::vector<UsageEvent> &events) {
  std::ostringstream out;
  out << "date,count\n";
  for (const auto &[day, n] : counts_by_day(events))
    out << day << ',' << n << '\n';
  return out.str();
}

std::vector<IntervalRow> session_intervals(const std::vector<UsageEvent> &events,
                                           const std::string &sessionId) {
  std::vector<std::pair<long long, const UsageEvent *>> mine;
  for (const auto &e : events)
    if (e.sessionId == sessionId)
      mine.push_back({parse_utc_timestamp(e.timestamp), &e});
  std::stable_sort(mine.begin(), mine.end(),
                   [](const auto &a, const auto &b) { return a.first < b.first; });
  std::vector<IntervalRow> out;
  for (std::size_t i = 1; i < mine.size(); ++i)
    out.push_back({mine[i].second->timestamp,
                   static_cast<double>(mine[i].first - mine[i - 1].first) / 1000.0,
                   mine[i].second->action, mine[i - 1].second->action});
  return out;
}

std::string intervals_csv(const std::vector<UsageEvent> &events, const std::string &sessionId) {
  std::ostringstream out;
  out << "timestamp,interval_secs,action,prev_action\n";
  for (const auto &r : session_intervals(events, sessionId)) {
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.3f", r.intervalSecs);
    out << r.timestamp << ',' << secs << ',' << r.action << ',' << r.prevAction << '\n';
  }
  return out.str();
}

} // namespace lff
