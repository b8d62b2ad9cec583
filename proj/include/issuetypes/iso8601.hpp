#pragma once

// ISO-8601 UTC timestamps at second resolution ("2017-02-28T21:22:45Z").
// All corpus timestamps are normalized through these two functions.

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <string>

#include "issuetypes/errors.hpp"

namespace issuetypes {

inline std::int64_t parse_iso8601_utc(const std::string& text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char zone = '\0';
  const int matched =
      std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &s, &zone);
  if (matched < 6 || (matched >= 7 && zone != 'Z' && zone != 'z' && zone != '+')) {
    throw ParseError("invalid ISO-8601 UTC timestamp: '" + text + "'");
  }
  std::tm tm{};
  tm.tm_year = y - 1900;
  tm.tm_mon = mo - 1;
  tm.tm_mday = d;
  tm.tm_hour = h;
  tm.tm_min = mi;
  tm.tm_sec = s;
  const time_t t = timegm(&tm);
  if (t == static_cast<time_t>(-1) && !(y == 1969 && mo == 12 && d == 31)) {
    throw ParseError("unrepresentable timestamp: '" + text + "'");
  }
  return static_cast<std::int64_t>(t);
}

inline std::string format_iso8601_utc(std::int64_t epoch_seconds) {
  const time_t t = static_cast<time_t>(epoch_seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

}  // namespace issuetypes
