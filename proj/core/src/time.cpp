#include "icmpsift/time.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace icmpsift {

namespace {
const char* kNames[7] = {"mon", "tue", "wed", "thu", "fri", "sat", "sun"};
}

std::optional<int> parse_weekday(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  for (int i = 0; i < 7; ++i) {
    if (lower.substr(0, 3) == kNames[i] && (lower.size() == 3 || lower.size() > 3)) {
      // accept both the 3-letter form and full names that start with it
      static const char* full[7] = {"monday", "tuesday", "wednesday", "thursday",
                                    "friday", "saturday", "sunday"};
      if (lower.size() == 3 || lower == full[i]) return i;
    }
  }
  return std::nullopt;
}

const char* weekday_name(int weekday) {
  return (weekday >= 0 && weekday < 7) ? kNames[weekday] : "?";
}

std::optional<Duration> parse_time_of_day(std::string_view text) {
  unsigned h = 0, m = 0, s = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  auto read = [&](unsigned& out) -> bool {
    auto [next, ec] = std::from_chars(p, end, out);
    if (ec != std::errc{} || next == p) return false;
    p = next;
    return true;
  };
  if (!read(h) || p == end || *p != ':') return std::nullopt;
  ++p;
  if (!read(m)) return std::nullopt;
  if (p != end) {
    if (*p != ':') return std::nullopt;
    ++p;
    if (!read(s) || p != end) return std::nullopt;
  }
  if (h > 24 || m > 59 || s > 59 || (h == 24 && (m != 0 || s != 0))) return std::nullopt;
  return Duration{((int64_t(h) * 60 + m) * 60 + s) * 1'000'000};
}

std::optional<Duration> parse_duration(std::string_view text) {
  if (text.empty()) return std::nullopt;
  uint64_t v = 0;
  auto [next, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || next == text.data()) return std::nullopt;
  std::string_view unit(next, size_t(text.data() + text.size() - next));
  int64_t us_per = 0;
  if (unit.empty() || unit == "ms") us_per = 1'000;
  else if (unit == "us") us_per = 1;
  else if (unit == "s") us_per = 1'000'000;
  else if (unit == "m" || unit == "min") us_per = 60ll * 1'000'000;
  else if (unit == "h") us_per = 3'600ll * 1'000'000;
  else if (unit == "d") us_per = 86'400ll * 1'000'000;
  else if (unit == "w") us_per = 7ll * 86'400 * 1'000'000;
  else return std::nullopt;
  return Duration{int64_t(v) * us_per};
}

}  // namespace icmpsift
