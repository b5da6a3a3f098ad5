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

#ifndef MEDEX_TIMEUTIL_H_
#define MEDEX_TIMEUTIL_H_

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace medex {

using TimePoint = std::chrono::sys_seconds;

// An instant plus the UTC offset it was written in. The offset defines what
// "today" means when resolving relative expressions.
struct DateTime {
  TimePoint utc{};
  std::chrono::minutes offset{0};

  // Wall-clock time in the stored zone, as if it were UTC.
  std::chrono::local_seconds local() const {
    return std::chrono::local_seconds{utc.time_since_epoch() + offset};
  }
  friend bool operator==(const DateTime &, const DateTime &) = default;
};

// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS[.frac]]" with optional
// "Z" / "+HH:MM" / "-HH:MM" suffix. A space may replace 'T'. Missing zone
// means UTC. Returns nullopt for anything else.
std::optional<DateTime> parse_datetime(std::string_view text);

// "YYYY-MM-DDTHH:MM:SSZ".
std::string format_utc(TimePoint t);

// RFC 3339 in the value's own offset ("Z" when the offset is zero).
std::string format_datetime(const DateTime &dt);

// Converts a local wall-clock time in the given offset to UTC.
inline TimePoint to_utc(std::chrono::local_seconds local,
                        std::chrono::minutes offset) {
  return TimePoint{local.time_since_epoch() - offset};
}

}  // namespace medex

#endif  // MEDEX_TIMEUTIL_H_
