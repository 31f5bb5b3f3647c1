#include "lff/usage.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <regex>

#include <unistd.h>

using namespace lff;
namespace fs = std::filesystem;

namespace {

UsageEvent ev(std::string ts, std::string session, std::string action) {
  UsageEvent e;
  e.timestamp = std::move(ts);
  e.sessionId = std::move(session);
  e.action = std::move(action);
  e.fullText = "Sorts:\n s.\n";
  e.outcomeKind = "ok";
  e.durationMs = 3;
  return e;
}

fs::path tempFile(const std::string &name) {
  const auto dir = fs::temp_directory_path() / ("lff-usage-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

} // namespace

TEST(Usage, LineRoundTrip) {
  auto e = ev("2026-03-01T10:00:00.250Z", "abc", "solve");
  e.fullText = "quote \" newline \n tab \t unicode \xc3\xa9";
  const auto line = usage_event_to_line(e);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_EQ(usage_event_from_line(line), e);
  EXPECT_THROW(usage_event_from_line("{not json"), std::runtime_error);
}

TEST(Usage, TimestampFormat) {
  const auto now = utc_timestamp_now();
  EXPECT_TRUE(std::regex_match(now, std::regex(R"(\d{4}-\d\d-\d\dT\d\d:\d\d:\d\d\.\d{3}Z)"))) << now;
  EXPECT_EQ(parse_utc_timestamp("1970-01-01T00:00:01.500Z"), 1500);
  EXPECT_EQ(parse_utc_timestamp("2026-01-01T00:00:00.000Z") -
                parse_utc_timestamp("2025-12-31T23:59:59.000Z"),
            1000);
  EXPECT_THROW(parse_utc_timestamp("2026-01-01 00:00:00"), std::invalid_argument);
}

TEST(Usage, ThreeEventCsv) {
  const std::vector<UsageEvent> events{ev("2026-03-01T10:00:00.000Z", "s1", "check"),
                                       ev("2026-03-01T10:00:12.500Z", "s1", "solve"),
                                       ev("2026-03-02T08:30:00.000Z", "s2", "solve")};
  EXPECT_EQ(by_day_csv(events), "date,count\n2026-03-01,2\n2026-03-02,1\n");
  EXPECT_EQ(intervals_csv(events, "s1"),
            "timestamp,interval_secs,action,prev_action\n"
            "2026-03-01T10:00:12.500Z,12.500,solve,check\n");
  // a single-event session has no interval rows
  EXPECT_EQ(intervals_csv(events, "s2"), "timestamp,interval_secs,action,prev_action\n");
}

TEST(Usage, IntervalsIgnoreOtherSessionsAndSortByTime) {
  const std::vector<UsageEvent> events{ev("2026-03-01T10:01:00.000Z", "a", "diagnose"),
                                       ev("2026-03-01T10:00:30.000Z", "b", "check"),
                                       ev("2026-03-01T10:00:00.000Z", "a", "check"),
                                       ev("2026-03-01T10:00:05.125Z", "a", "solve")};
  const auto rows = session_intervals(events, "a");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_DOUBLE_EQ(rows[0].intervalSecs, 5.125);
  EXPECT_EQ(rows[0].prevAction, "check");
  EXPECT_EQ(rows[1].action, "diagnose");
  EXPECT_DOUBLE_EQ(rows[1].intervalSecs, 54.875);
}

TEST(Usage, SyntheticLogCountsPerDay) {
  std::mt19937 rng(11);
  const auto path = tempFile("synthetic.jsonl");
  fs::remove(path);
  std::map<std::string, int> expected;
  {
    UsageLog log(path);
    for (int day = 1; day <= 9; ++day) {
      const int n = std::uniform_int_distribution<int>(0, 40)(rng);
      char date[16];
      std::snprintf(date, sizeof date, "2026-04-%02d", day);
      for (int k = 0; k < n; ++k) {
        char ts[40];
        std::snprintf(ts, sizeof ts, "%sT%02d:%02d:00.000Z", date, k % 24, k % 60);
        log.append(ev(ts, "s" + std::to_string(k % 3), k % 2 ? "solve" : "check"));
      }
      if (n)
        expected[date] = n;
    }
  }
  const auto events = read_usage_log(path);
  EXPECT_EQ(counts_by_day(events), expected);
  std::string csv = "date,count\n";
  for (const auto &[d, n] : expected)
    csv += d + "," + std::to_string(n) + "\n";
  EXPECT_EQ(by_day_csv(events), csv);
}

TEST(Usage, MalformedLogLineNamesLine) {
  const auto path = tempFile("bad.jsonl");
  {
    std::ofstream out(path);
    out << usage_event_to_line(ev("2026-03-01T10:00:00.000Z", "a", "check")) << "\n\n{}\n";
  }
  try {
    read_usage_log(path);
    FAIL() << "expected a throw";
  } catch (const std::runtime_error &e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
}
