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

// Canonical forms for temporal and locality phrases, plus the entity-linker
// extension point.

#ifndef MEDEX_CANONICALIZE_H_
#define MEDEX_CANONICALIZE_H_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "medex/docmodel.h"
#include "medex/timeutil.h"

namespace medex {

// ---------------------------------------------------------------------------
// Temporal expressions

enum class TimexKind { kExactTime, kDuration };

std::string_view timex_kind_name(TimexKind kind);

struct Timex3Instance {
  TimexKind kind = TimexKind::kDuration;
  TimePoint start{};
  TimePoint end{};
  PhraseSpan span;

  double duration_seconds() const {
    return static_cast<double>((end - start).count());
  }
  // Midpoint in seconds since the epoch.
  double midpoint() const {
    return (static_cast<double>(start.time_since_epoch().count()) +
            static_cast<double>(end.time_since_epoch().count())) /
           2.0;
  }
  friend bool operator==(const Timex3Instance &, const Timex3Instance &) = default;
};

enum class TemporalOutcome {
  kResolved,
  kRepetitive,      // "every Monday": filtered out
  kMissingPubDate,  // relative expression without an anchor
  kUnsupported,     // outside the rule subset, or an unanchored duration
};

struct TemporalPhraseResult {
  TemporalOutcome outcome = TemporalOutcome::kUnsupported;
  std::optional<Timex3Instance> instance;
};

// Interprets one phrase (already split into words). `anchor` supplies the
// reference day and time zone for relative expressions.
TemporalPhraseResult resolve_temporal_phrase(
    const std::vector<std::string> &words, const std::optional<DateTime> &anchor);

struct TemporalNormalization {
  std::vector<Timex3Instance> instances;
  // Phrases that were dropped because they needed a publish date.
  std::vector<PhraseSpan> missing_pub_date;
};

// Groups DATE/TIME/DURATION/SET tokens into phrases (function words may sit
// between temporal tokens) and resolves each against `pub_date`.
TemporalNormalization normalize_temporal(const AnnotatedDocument &doc,
                                         const std::optional<DateTime> &pub_date);

// The token ranges normalize_temporal would interpret, before resolution.
std::vector<PhraseSpan> temporal_phrases(const AnnotatedDocument &doc);

// ---------------------------------------------------------------------------
// Locations

bool is_location_tag(std::string_view ner);

// Merges location tokens separated by at most `r_where` other tokens, as long
// as both ends sit inside a common NP or VP. Spans are in document order.
std::vector<PhraseSpan> merge_location_tokens(const AnnotatedDocument &doc,
                                              int r_where = 1);

inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kMinAreaM2 = 225.0;

struct BoundingBox {
  double south = 0, west = 0, north = 0, east = 0;

  bool contains(double lat, double lon) const;
  friend bool operator==(const BoundingBox &, const BoundingBox &) = default;
};

// Spherical-earth area of a lat/lon box, never below kMinAreaM2. Boxes with
// east < west wrap across the antimeridian.
double bbox_area(const BoundingBox &bbox);

struct Geocode {
  double lat = 0;
  double lon = 0;
  BoundingBox bbox;
  std::string place_id;
  std::string display_name;
  double area_m2 = kMinAreaM2;
  PhraseSpan span;
};

// ---------------------------------------------------------------------------
// Entity linking

struct LinkedEntity {
  PhraseSpan span;
  std::string concept_id;
  double confidence = 0;
};

class EntityLinker {
 public:
  virtual ~EntityLinker() = default;
  virtual std::vector<LinkedEntity> link(const AnnotatedDocument &doc) = 0;
};

class NullEntityLinker : public EntityLinker {
 public:
  std::vector<LinkedEntity> link(const AnnotatedDocument &) override {
    return {};
  }
};

// Runs `linker` (the null linker when absent). Provider errors propagate.
std::vector<LinkedEntity> link_entities(const AnnotatedDocument &doc,
                                        EntityLinker *linker = nullptr);

}  // namespace medex

#endif  // MEDEX_CANONICALIZE_H_
