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

#include "medex/canonicalize.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <set>

#include "medex/textutil.h"

namespace medex {

using namespace std::chrono;

std::string_view timex_kind_name(TimexKind kind) {
  return kind == TimexKind::kExactTime ? "EXACT_TIME" : "DURATION";
}

// --- Temporal rule subset ----------------------------------------------------

namespace {

constexpr std::array<std::string_view, 7> kWeekdays = {
    "monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"};
constexpr std::array<std::string_view, 12> kMonths = {
    "january", "february", "march",     "april",   "may",      "june",
    "july",    "august",   "september", "october", "november", "december"};

// Index 0 = Monday.
std::optional<int> weekday_index(std::string_view w) {
  if (w == "tues") return 1;
  if (w == "thur" || w == "thurs") return 3;
  for (size_t i = 0; i < kWeekdays.size(); ++i) {
    if (w == kWeekdays[i] || (w.size() == 3 && kWeekdays[i].substr(0, 3) == w))
      return static_cast<int>(i);
  }
  return std::nullopt;
}

bool is_plural_weekday(std::string_view w) {
  return w.size() > 4 && w.back() == 's' &&
         weekday_index(w.substr(0, w.size() - 1)).has_value();
}

// 1-based month.
std::optional<int> month_index(std::string_view w) {
  if (w == "sept") return 9;
  for (size_t i = 0; i < kMonths.size(); ++i) {
    if (w == kMonths[i] || (w.size() == 3 && kMonths[i].substr(0, 3) == w))
      return static_cast<int>(i) + 1;
  }
  return std::nullopt;
}

std::optional<int> parse_number(std::string_view w) {
  for (std::string_view suffix : {"st", "nd", "rd", "th"}) {
    if (w.size() > suffix.size() && w.substr(w.size() - suffix.size()) == suffix &&
        std::isdigit(static_cast<unsigned char>(w[w.size() - suffix.size() - 1]))) {
      w.remove_suffix(suffix.size());
      break;
    }
  }
  if (w.empty() || w.size() > 4) return std::nullopt;
  int v = 0;
  for (char c : w) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v;
}

bool is_meridian(std::string_view w, bool *pm) {
  if (w == "am" || w == "a.m" || w == "a.m.") {
    *pm = false;
    return true;
  }
  if (w == "pm" || w == "p.m" || w == "p.m.") {
    *pm = true;
    return true;
  }
  return false;
}

const std::set<std::string_view> kRepetitiveWords = {
    "every", "each", "daily", "weekly", "monthly", "annually",
    "yearly", "hourly", "nightly", "weekdays", "weekends"};

const std::set<std::string_view> kIgnorableWords = {
    "late",      "early", "mid",   "morning", "afternoon", "evening",
    "night",     "at",    "on",    "in",      "of",        "the",
    "around",    "about", "by",    ",",       "o'clock",   "and",
    "overnight", "-",     "until", "day"};

struct TemporalParse {
  bool repetitive = false;
  bool unknown = false;
  std::optional<int> rel_day;
  std::optional<int> weekday;
  int modifier = 0;  // -1 last, +1 next, 0 none/this
  bool has_modifier = false;
  bool this_modifier = false;
  char rel_unit = 0;  // 'w', 'm', 'y'
  std::optional<int> year, month, day, hour, minute;
};

bool parse_clock(std::string_view w, TemporalParse *p) {
  // "13:00", "1:30", "6pm", "6:30pm"
  bool pm = false;
  bool has_meridian = false;
  for (std::string_view suffix : {"a.m.", "p.m.", "am", "pm"}) {
    if (w.size() > suffix.size() && w.substr(w.size() - suffix.size()) == suffix) {
      has_meridian = is_meridian(suffix, &pm);
      w.remove_suffix(suffix.size());
      break;
    }
  }
  int h = 0, m = 0;
  size_t colon = w.find(':');
  if (colon != std::string_view::npos) {
    auto hh = parse_number(w.substr(0, colon));
    auto mm = parse_number(w.substr(colon + 1));
    if (!hh || !mm || w.substr(colon + 1).size() != 2) return false;
    h = *hh;
    m = *mm;
  } else {
    if (!has_meridian) return false;
    auto hh = parse_number(w);
    if (!hh) return false;
    h = *hh;
  }
  if (has_meridian) {
    if (h < 1 || h > 12) return false;
    if (pm && h < 12) h += 12;
    if (!pm && h == 12) h = 0;
  }
  if (h > 23 || m > 59) return false;
  p->hour = h;
  p->minute = m;
  return true;
}

TemporalParse parse_words(const std::vector<std::string> &raw) {
  TemporalParse p;
  std::vector<std::string> words;
  for (const auto &r : raw) {
    std::string w = to_lower(r);
    if (w.size() > 1 && w.back() == '.' && w != "a.m." && w != "p.m.")
      w.pop_back();
    if (!w.empty()) words.push_back(std::move(w));
  }

  for (size_t i = 0; i < words.size(); ++i) {
    const std::string &w = words[i];
    const std::string next = i + 1 < words.size() ? words[i + 1] : "";
    bool pm = false;

    if (kRepetitiveWords.count(w) || is_plural_weekday(w)) {
      p.repetitive = true;
    } else if (w == "today" || w == "tonight") {
      p.rel_day = 0;
    } else if (w == "yesterday") {
      p.rel_day = -1;
    } else if (w == "tomorrow") {
      p.rel_day = 1;
    } else if (auto wd = weekday_index(w)) {
      p.weekday = *wd;
    } else if (w == "last" || w == "past" || w == "previous") {
      p.has_modifier = true;
      p.modifier = -1;
    } else if (w == "next" || w == "coming") {
      p.has_modifier = true;
      p.modifier = 1;
    } else if (w == "this" || w == "current") {
      p.has_modifier = true;
      p.this_modifier = true;
      p.modifier = 0;
    } else if (w == "week" || w == "month" || w == "year") {
      if (!p.has_modifier) {
        p.unknown = true;
      } else {
        p.rel_unit = w[0] == 'w' ? 'w' : (w[0] == 'm' ? 'm' : 'y');
      }
    } else if (auto mo = month_index(w)) {
      p.month = *mo;
    } else if (w == "noon" || w == "midday") {
      p.hour = 12;
      p.minute = 0;
    } else if (w == "midnight") {
      p.hour = 0;
      p.minute = 0;
    } else if (is_meridian(w, &pm)) {
      if (!p.hour) {
        p.unknown = true;
      } else if (*p.hour >= 1 && *p.hour <= 12) {
        if (pm && *p.hour < 12) *p.hour += 12;
        if (!pm && *p.hour == 12) p.hour = 0;
      } else {
        p.unknown = true;
      }
    } else if (w.size() == 10 && w[4] == '-' && w[7] == '-') {
      auto dt = parse_datetime(w);
      if (!dt) {
        p.unknown = true;
      } else {
        year_month_day ymd{floor<days>(dt->utc)};
        p.year = static_cast<int>(ymd.year());
        p.month = static_cast<unsigned>(ymd.month());
        p.day = static_cast<unsigned>(ymd.day());
      }
    } else if (parse_clock(w, &p)) {
      // clock time consumed
    } else if (auto n = parse_number(w)) {
      bool pm_next = false;
      if (is_meridian(next, &pm_next) || next == "o'clock") {
        p.hour = *n;
        p.minute = 0;
      } else if (w.size() == 4 && *n >= 1000) {
        p.year = *n;
      } else if (*n >= 1 && *n <= 31 && !p.day &&
                 (p.month || month_index(next) ||
                  (next == "of" && i + 2 < words.size() &&
                   month_index(words[i + 2])))) {
        p.day = *n;
      } else {
        p.unknown = true;
      }
    } else if (kIgnorableWords.count(w)) {
      // modifiers that keep day granularity
    } else {
      p.unknown = true;
    }
  }
  return p;
}

Timex3Instance day_span(local_days d, minutes offset) {
  Timex3Instance t;
  t.kind = TimexKind::kDuration;
  t.start = to_utc(local_seconds{d}, offset);
  t.end = to_utc(local_seconds{d} + hours{23} + minutes{59} + seconds{59}, offset);
  return t;
}

Timex3Instance range_span(local_days first, local_days last, minutes offset) {
  Timex3Instance t = day_span(first, offset);
  t.end = day_span(last, offset).end;
  return t;
}

local_days last_day_of_month(year y, month m) {
  return local_days{year_month_day_last{y, month_day_last{m}}};
}

}  // namespace

TemporalPhraseResult resolve_temporal_phrase(
    const std::vector<std::string> &words, const std::optional<DateTime> &anchor) {
  TemporalPhraseResult result;
  TemporalParse p = parse_words(words);
  if (p.repetitive) {
    result.outcome = TemporalOutcome::kRepetitive;
    return result;
  }
  if (p.unknown) return result;

  const minutes offset = anchor ? anchor->offset : minutes{0};
  std::optional<local_days> anchor_day;
  if (anchor) anchor_day = floor<days>(anchor->local());
  auto missing = [&] {
    result.outcome = TemporalOutcome::kMissingPubDate;
    return result;
  };

  std::optional<local_days> day;
  std::optional<Timex3Instance> range;

  if (p.rel_day) {
    if (!anchor_day) return missing();
    day = *anchor_day + days{*p.rel_day};
  } else if (p.weekday) {
    if (!anchor_day) return missing();
    int anchor_wd = static_cast<int>(weekday{*anchor_day}.iso_encoding()) - 1;
    int back = (anchor_wd - *p.weekday + 7) % 7;
    if (p.this_modifier) {
      day = *anchor_day - days{anchor_wd} + days{*p.weekday};
    } else if (p.has_modifier && p.modifier > 0) {
      int fwd = (*p.weekday - anchor_wd + 7) % 7;
      day = *anchor_day + days{fwd == 0 ? 7 : fwd};
    } else if (p.has_modifier && p.modifier < 0) {
      day = *anchor_day - days{back == 0 ? 7 : back};
    } else {
      // News reports past events: the most recent such day, publication day
      // included.
      day = *anchor_day - days{back};
    }
  } else if (p.rel_unit) {
    if (!anchor_day) return missing();
    year_month_day a{*anchor_day};
    if (p.rel_unit == 'w') {
      int anchor_wd = static_cast<int>(weekday{*anchor_day}.iso_encoding()) - 1;
      local_days monday = *anchor_day - days{anchor_wd} + days{7 * p.modifier};
      range = range_span(monday, monday + days{6}, offset);
    } else if (p.rel_unit == 'm') {
      year_month ym = year_month{a.year(), a.month()} + months{p.modifier};
      range = range_span(local_days{ym / 1}, last_day_of_month(ym.year(), ym.month()),
                         offset);
    } else {
      year y = a.year() + years{p.modifier};
      range = range_span(local_days{y / January / 1}, local_days{y / December / 31},
                         offset);
    }
  } else if (p.month || p.year || p.day) {
    if (p.day && !p.month) return result;
    std::optional<int> y = p.year;
    if (!y && p.month) {
      if (!anchor_day) return missing();
      y = static_cast<int>(year_month_day{*anchor_day}.year());
    }
    if (p.month && p.day) {
      year_month_day ymd{year{*y}, month{static_cast<unsigned>(*p.month)},
                         std::chrono::day{static_cast<unsigned>(*p.day)}};
      if (!ymd.ok()) return result;
      day = local_days{ymd};
    } else if (p.month) {
      year yy{*y};
      month mm{static_cast<unsigned>(*p.month)};
      range = range_span(local_days{yy / mm / 1}, last_day_of_month(yy, mm), offset);
    } else {
      year yy{*y};
      range = range_span(local_days{yy / January / 1},
                         local_days{yy / December / 31}, offset);
    }
  } else if (p.hour) {
    if (!anchor_day) return missing();
    day = *anchor_day;
  } else {
    return result;
  }

  Timex3Instance t;
  if (day && p.hour) {
    local_seconds at = local_seconds{*day} + hours{*p.hour} + minutes{p.minute.value_or(0)};
    t.kind = TimexKind::kExactTime;
    t.start = to_utc(at, offset);
    t.end = t.start;
  } else if (day) {
    t = day_span(*day, offset);
  } else if (range && !p.hour) {
    t = *range;
  } else {
    return result;
  }
  result.outcome = TemporalOutcome::kResolved;
  result.instance = t;
  return result;
}

namespace {

bool is_temporal_tag(std::string_view ner) {
  return ner == "DATE" || ner == "TIME" || ner == "DURATION" || ner == "SET";
}

const std::set<std::string_view> kTemporalConnectors = {
    "at", "on", "in", "of", "the", "around", "about", "by", ","};

const std::set<std::string_view> kTemporalPrefixes = {
    "every", "each", "last", "next", "this", "late", "early", "mid", "past"};

}  // namespace

std::vector<PhraseSpan> temporal_phrases(const AnnotatedDocument &doc) {
  std::vector<PhraseSpan> out;
  for (int si = 0; si < doc.d_len(); ++si) {
    const auto &tokens = doc.sentences[si].tokens;
    const int n = static_cast<int>(tokens.size());
    int i = 0;
    while (i < n) {
      if (!is_temporal_tag(tokens[i].ner)) {
        ++i;
        continue;
      }
      int begin = i;
      int end = i + 1;
      while (true) {
        if (end < n && is_temporal_tag(tokens[end].ner)) {
          ++end;
          continue;
        }
        // Up to two function words may bridge two temporal tokens.
        int j = end;
        while (j < n && j - end < 2 && !is_temporal_tag(tokens[j].ner) &&
               kTemporalConnectors.count(to_lower(tokens[j].text)))
          ++j;
        if (j > end && j < n && is_temporal_tag(tokens[j].ner)) {
          end = j + 1;
          continue;
        }
        break;
      }
      if (begin > 0 && kTemporalPrefixes.count(to_lower(tokens[begin - 1].text)))
        --begin;
      out.push_back({si, begin, end});
      i = end;
    }
  }
  return out;
}

TemporalNormalization normalize_temporal(const AnnotatedDocument &doc,
                                         const std::optional<DateTime> &pub_date) {
  TemporalNormalization out;
  for (const PhraseSpan &span : temporal_phrases(doc)) {
    std::vector<std::string> words;
    for (int k = span.begin; k < span.end; ++k)
      words.push_back(doc.token(span.sentence, k).text);
    TemporalPhraseResult r = resolve_temporal_phrase(words, pub_date);
    if (r.outcome == TemporalOutcome::kResolved) {
      r.instance->span = span;
      out.instances.push_back(*r.instance);
    } else if (r.outcome == TemporalOutcome::kMissingPubDate) {
      out.missing_pub_date.push_back(span);
    }
  }
  return out;
}

// --- Locations ---------------------------------------------------------------

bool is_location_tag(std::string_view ner) {
  return ner == "LOCATION" || ner == "LOC" || ner == "GPE" || ner == "CITY" ||
         ner == "COUNTRY" || ner == "STATE_OR_PROVINCE";
}

namespace {

// True when some NP or VP covers both tokens.
bool share_np_or_vp(const ParseNode &root, int a, int b) {
  const ParseNode *node = &root;
  bool found = false;
  while (node) {
    if (node->label == "NP" || node->label == "VP") found = true;
    const ParseNode *next = nullptr;
    for (const auto &c : node->children) {
      if (c.begin <= a && b < c.end) {
        next = &c;
        break;
      }
    }
    node = next;
  }
  return found;
}

}  // namespace

std::vector<PhraseSpan> merge_location_tokens(const AnnotatedDocument &doc,
                                              int r_where) {
  std::vector<PhraseSpan> out;
  for (int si = 0; si < doc.d_len(); ++si) {
    const Sentence &s = doc.sentences[si];
    std::optional<PhraseSpan> current;
    for (int i = 0; i < static_cast<int>(s.tokens.size()); ++i) {
      if (!is_location_tag(s.tokens[i].ner)) continue;
      if (current && i - current->end <= r_where &&
          share_np_or_vp(s.parse, current->end - 1, i)) {
        current->end = i + 1;
        continue;
      }
      if (current) out.push_back(*current);
      current = PhraseSpan{si, i, i + 1};
    }
    if (current) out.push_back(*current);
  }
  return out;
}

bool BoundingBox::contains(double lat, double lon) const {
  if (lat < south || lat > north) return false;
  if (west <= east) return lon >= west && lon <= east;
  return lon >= west || lon <= east;
}

double bbox_area(const BoundingBox &bbox) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  double dlon = bbox.east - bbox.west;
  if (dlon < 0) dlon += 360.0;
  dlon = std::min(dlon, 360.0);
  double south = std::clamp(bbox.south, -90.0, 90.0);
  double north = std::clamp(bbox.north, -90.0, 90.0);
  double area = kEarthRadiusM * kEarthRadiusM * dlon * kDeg *
                std::fabs(std::sin(north * kDeg) - std::sin(south * kDeg));
  return std::max(area, kMinAreaM2);
}

std::vector<LinkedEntity> link_entities(const AnnotatedDocument &doc,
                                        EntityLinker *linker) {
  NullEntityLinker null_linker;
  EntityLinker &impl = linker ? *linker : null_linker;
  return impl.link(doc);
}

}  // namespace medex
