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

#include "medex/evalkit.h"

#include <set>
#include <sstream>

#include "json.hpp"
#include "medex/errors.h"
#include "medex/textutil.h"

namespace medex {

using nlohmann::json;

bool is_valid_grade(double grade) { return grade == 0 || grade == 0.5 || grade == 1; }

void validate_assessments(const std::vector<Assessment> &assessments) {
  for (size_t i = 0; i < assessments.size(); ++i)
    if (!is_valid_grade(assessments[i].grade))
      throw SchemaError("$[" + std::to_string(i) + "].grade", "grade must be 0, 0.5 or 1");
}

namespace {

template <typename Fn>
void for_each_record(const std::string &path, Fn &&fn) {
  std::istringstream in(read_file(path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::string where = path + ":" + std::to_string(lineno);
    try {
      fn(json::parse(line), where);
    } catch (const json::exception &e) {
      throw SchemaError(where, e.what());
    }
  }
}

Question parse_question(const json &j, const std::string &where) {
  auto q = question_from_name(j.get<std::string>());
  if (!q) throw SchemaError(where + ".question", "unknown question");
  return *q;
}

}  // namespace

std::vector<Assessment> load_assessments(const std::string &path) {
  std::vector<Assessment> out;
  for_each_record(path, [&](const json &rec, const std::string &where) {
    Assessment a;
    a.article_id = rec.at("article").get<std::string>();
    a.question = parse_question(rec.at("question"), where);
    a.grade = rec.at("grade").get<double>();
    a.category = rec.value("category", "");
    if (!is_valid_grade(a.grade)) throw SchemaError(where + ".grade", "grade must be 0, 0.5 or 1");
    out.push_back(std::move(a));
  });
  return out;
}

MagpReport magp(const std::vector<Assessment> &assessments, GroupBy group_by) {
  validate_assessments(assessments);
  MagpReport report;
  if (group_by == GroupBy::kOverall) {
    report.overall = magp_overall(assessments);
    if (report.overall) report.groups["overall"] = *report.overall;
    return report;
  }
  std::map<std::string, std::pair<double, int>> acc;
  for (const auto &a : assessments) {
    std::string key = group_by == GroupBy::kQuestion ? std::string(question_name(a.question))
                                                     : a.category;
    acc[key].first += a.grade;
    acc[key].second += 1;
  }
  for (const auto &[key, sum] : acc) report.groups[key] = sum.first / sum.second;
  report.overall = magp_overall(assessments);
  return report;
}

std::optional<double> magp_overall(const std::vector<Assessment> &assessments) {
  validate_assessments(assessments);
  std::map<Question, std::pair<double, int>> acc;
  for (const auto &a : assessments) {
    acc[a.question].first += a.grade;
    acc[a.question].second += 1;
  }
  if (acc.empty()) return std::nullopt;
  double total = 0;
  for (const auto &[q, sum] : acc) total += sum.first / sum.second;
  return total / static_cast<double>(acc.size());
}

bool token_set_equal(const std::string &a, const std::string &b) {
  auto words = [](const std::string &s) {
    auto toks = simple_tokenize(s, true);
    return std::set<std::string>(toks.begin(), toks.end());
  };
  return words(a) == words(b);
}

void validate_annotations(const AnnotationSet &annos) {
  if (annos.empty()) return;
  const auto &[first_id, first] = *annos.begin();
  for (const auto &[id, keys] : annos) {
    bool same = keys.size() == first.size();
    for (auto a = keys.begin(), b = first.begin(); same && a != keys.end(); ++a, ++b)
      same = a->first == b->first;
    if (!same)
      throw SchemaError("$." + id, "annotator covers different keys than " + first_id);
  }
}

double icr(const AnnotationSet &annos, const PhraseEquality &equal) {
  if (annos.size() < 2)
    throw ArityError("intercoder reliability needs at least two annotators, got " +
                     std::to_string(annos.size()));
  validate_annotations(annos);
  double total = 0;
  int pairs = 0;
  for (auto i = annos.begin(); i != annos.end(); ++i) {
    for (auto j = std::next(i); j != annos.end(); ++j) {
      int agree = 0;
      for (const auto &[key, phrase] : i->second)
        if (equal(phrase, j->second.at(key))) ++agree;
      size_t n = i->second.size();
      total += n == 0 ? 1.0 : static_cast<double>(agree) / static_cast<double>(n);
      ++pairs;
    }
  }
  return total / pairs;
}

AnnotationSet load_annotations(const std::string &path) {
  AnnotationSet out;
  for_each_record(path, [&](const json &rec, const std::string &where) {
    AnnotationKey key{rec.at("article").get<std::string>(),
                      parse_question(rec.at("question"), where)};
    out[rec.at("annotator").get<std::string>()][key] = rec.at("phrase").get<std::string>();
  });
  validate_annotations(out);
  return out;
}

}  // namespace medex
