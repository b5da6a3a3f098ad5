// Copyright 2026 The medex Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "medex/timeutil.h"

#include <cctype>
#include <cstdio>

namespace medex {

namespace {

using namespace std::chrono;

bool read_int(std::string_view s, size_t pos, size_t len, int *out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (size_t i = pos; i < pos + len; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    v = v * 10 + (s[i] - '0');
  }
  *out = v;
  return true;
}

}  // namespace

std::optional<DateTime> parse_datetime(std::string_view s) {
  int y, mo, d;
  if (!read_int(s, 0, 4, &y) || s.size() < 10 || s[4] != '-' ||
      !read_int(s, 5, 2, &mo) || s[7] != '-' || !read_int(s, 8, 2, &d)) {
    return std::nullopt;
  }
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                     day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;

  int hh = 0, mm = 0, ss = 0;
  size_t pos = 10;
  if (pos < s.size() && (s[pos] == 'T' || s[pos] == 't' || s[pos] == ' ')) {
    if (!read_int(s, pos + 1, 2, &hh) || pos + 3 >= s.size() ||
        s[pos + 3] != ':' || !read_int(s, pos + 4, 2, &mm)) {
      return std::nullopt;
    }
    pos += 6;
    if (pos < s.size() && s[pos] == ':') {
      if (!read_int(s, pos + 1, 2, &ss)) return std::nullopt;
      pos += 3;
      if (pos < s.size() && s[pos] == '.') {
        ++pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
          ++pos;
      }
    }
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  }

  minutes offset{0};
  if (pos < s.size()) {
    char c = s[pos];
    if (c == 'Z' || c == 'z') {
      ++pos;
    } else if (c == '+' || c == '-') {
      int oh, om;
      if (!read_int(s, pos + 1, 2, &oh) || pos + 3 >= s.size() ||
          s[pos + 3] != ':' || !read_int(s, pos + 4, 2, &om)) {
        return std::nullopt;
      }
      offset = minutes{oh * 60 + om};
      if (c == '-') offset = -offset;
      pos += 6;
    }
  }
  if (pos != s.size()) return std::nullopt;

  local_seconds local =
      local_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
  return DateTime{to_utc(local, offset), offset};
}

std::string format_utc(TimePoint t) {
  auto dp = floor<days>(t);
  year_month_day ymd{dp};
  hh_mm_ss hms{t - dp};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::string format_datetime(const DateTime &dt) {
  if (dt.offset == minutes{0}) return format_utc(dt.utc);
  std::string local = format_utc(TimePoint{dt.local().time_since_epoch()});
  local.pop_back();  // 'Z'
  int off = static_cast<int>(dt.offset.count());
  char sign = off < 0 ? '-' : '+';
  if (off < 0) off = -off;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%02d:%02d", sign, off / 60, off % 60);
  return local + buf;
}

}  // namespace medex
