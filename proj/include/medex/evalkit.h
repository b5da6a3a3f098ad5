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

// Evaluation metrics: graded-relevance MAgP and intercoder reliability.

#ifndef MEDEX_EVALKIT_H_
#define MEDEX_EVALKIT_H_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "medex/extractors.h"

namespace medex {

// A relevance judgement on the three-point scale {0, 0.5, 1}.
struct Assessment {
  std::string article_id;
  Question question = Question::kWho;
  std::string category;  // free-form article category, may be empty
  double grade = 0;
};

bool is_valid_grade(double grade);

// Throws SchemaError for grades outside the scale.
void validate_assessments(const std::vector<Assessment> &assessments);

// JSON lines: {"article", "question", "grade", "category"?}.
std::vector<Assessment> load_assessments(const std::string &path);

enum class GroupBy { kQuestion, kCategory, kOverall };

struct MagpReport {
  // Mean grade per group. Groups without assessments are absent.
  std::map<std::string, double> groups;
  // kOverall: mean of the per-question means.
  std::optional<double> overall;
};

MagpReport magp(const std::vector<Assessment> &assessments, GroupBy group_by);

// Mean of the per-question means; nullopt without assessments.
std::optional<double> magp_overall(const std::vector<Assessment> &assessments);

// annotator -> (article, question) -> phrase.
using AnnotationKey = std::pair<std::string, Question>;
using AnnotationSet = std::map<std::string, std::map<AnnotationKey, std::string>>;

using PhraseEquality = std::function<bool(const std::string &, const std::string &)>;

// Case-insensitive equality of the phrases' token sets.
bool token_set_equal(const std::string &a, const std::string &b);

// Throws SchemaError when annotators cover different keys.
void validate_annotations(const AnnotationSet &annos);

// Mean over annotator pairs of the fraction of keys they agree on. Throws
// ArityError with fewer than two annotators.
double icr(const AnnotationSet &annos, const PhraseEquality &equal = token_set_equal);

// JSON lines: {"annotator", "article", "question", "phrase"}.
AnnotationSet load_annotations(const std::string &path);

}  // namespace medex

#endif  // MEDEX_EVALKIT_H_
