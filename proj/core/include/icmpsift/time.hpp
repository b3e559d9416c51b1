#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace icmpsift {

// All timestamps are UTC with microsecond resolution.
using Duration = std::chrono::microseconds;
using Timestamp = std::chrono::time_point<std::chrono::system_clock, Duration>;

inline Timestamp timestamp_from_us(int64_t micros) {
  return Timestamp{Duration{micros}};
}

inline int64_t timestamp_us(Timestamp t) {
  return t.time_since_epoch().count();
}

// 0 = Monday ... 6 = Sunday, UTC. 1970-01-01 was a Thursday.
inline int weekday_utc(Timestamp t) {
  int64_t us = timestamp_us(t);
  constexpr int64_t day = 86'400'000'000;
  int64_t days = us >= 0 ? us / day : -((-us + day - 1) / day);
  return int(((days + 3) % 7 + 7) % 7);
}

inline Duration time_of_day_utc(Timestamp t) {
  int64_t us = timestamp_us(t);
  constexpr int64_t day = 86'400'000'000;
  int64_t rem = us % day;
  if (rem < 0) rem += day;
  return Duration{rem};
}

// Accepts "mon".."sun" (any case) or full names.
std::optional<int> parse_weekday(std::string_view name);
const char* weekday_name(int weekday);

// "HH:MM" or "HH:MM:SS"; "24:00" denotes end of day.
std::optional<Duration> parse_time_of_day(std::string_view text);

// "500ms", "30s", "15m", "2h", "14d", "2w"; bare numbers are milliseconds.
std::optional<Duration> parse_duration(std::string_view text);

}  // namespace icmpsift
