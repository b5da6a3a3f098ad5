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

// End-to-end extraction over an annotated document and the JSON result
// schema shared by the CLI, the REST service and the Python module.

#ifndef MEDEX_PIPELINE_H_
#define MEDEX_PIPELINE_H_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "medex/canonicalize.h"
#include "medex/docmodel.h"
#include "medex/extractors.h"
#include "medex/geocoder.h"
#include "medex/scoring.h"

namespace medex {

inline constexpr size_t kDefaultTopK = 5;

struct PipelineOptions {
  ScoringConfig config;
  LexiconSet lexicons = LexiconSet::shipped();
  GeocoderClient *geocoder = nullptr;  // no WHERE candidates without one
  EntityLinker *linker = nullptr;
  size_t top_k = kDefaultTopK;
  int r_where = 1;
  CausalVerbConstraint cause_constraint;
};

// Unscored candidates of every question, indexed by Question.
struct CandidateSets {
  std::array<std::vector<Candidate>, 6> by_question;
  std::vector<PhraseSpan> missing_pub_date;
  std::vector<std::string> warnings;

  std::vector<Candidate> &operator[](Question q) {
    return by_question[static_cast<size_t>(q)];
  }
  const std::vector<Candidate> &operator[](Question q) const {
    return by_question[static_cast<size_t>(q)];
  }
};

// Runs the four extraction chains plus temporal and location
// canonicalization. Geocoder NetworkErrors propagate.
CandidateSets extract_candidates(const AnnotatedDocument &doc, const PipelineOptions &opts);

// Scores all questions in place, including the how/action adjustment.
void score_candidates(CandidateSets &sets, const AnnotatedDocument &doc,
                      const ScoringConfig &cfg);

struct TokenInfo {
  std::string text;
  std::string pos;
  std::string tree_path;
  std::string ner;
};

struct Answer {
  Candidate candidate;
  std::vector<TokenInfo> tokens;
  std::vector<LinkedEntity> concepts;
};

struct QuestionResult {
  std::optional<Answer> answer;
  std::vector<Answer> candidates;  // best first, at most top_k
};

struct ResultMetadata {
  bool coref_fallback = false;  // frequency used head lemmas instead of chains
  std::vector<PhraseSpan> missing_pub_date;
  std::vector<std::string> warnings;
};

struct ExtractionResult {
  std::array<QuestionResult, 6> questions;
  ResultMetadata metadata;

  const QuestionResult &operator[](Question q) const {
    return questions[static_cast<size_t>(q)];
  }
};

ExtractionResult run_pipeline(const AnnotatedDocument &doc, const PipelineOptions &opts);

nlohmann::ordered_json to_json(const ExtractionResult &result);
// Canonical text form: to_json(result).dump(2) plus a trailing newline.
std::string serialize_result(const ExtractionResult &result);

}  // namespace medex

#endif  // MEDEX_PIPELINE_H_
