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

#include "medex/pipeline.h"

#include "medex/errors.h"
#include "medex/timeutil.h"

namespace medex {

using json = nlohmann::ordered_json;

CandidateSets extract_candidates(const AnnotatedDocument &doc, const PipelineOptions &opts) {
  if (doc.d_len() == 0) throw DegenerateDocument("document has no sentences");
  CandidateSets sets;

  for (auto &pair : extract_action(doc)) {
    sets[Question::kWho].push_back(std::move(pair.who));
    sets[Question::kWhat].push_back(std::move(pair.what));
  }

  TemporalNormalization temporal = normalize_temporal(doc, doc.source.publish_date);
  sets.missing_pub_date = temporal.missing_pub_date;
  if (!temporal.missing_pub_date.empty())
    sets.warnings.push_back(std::to_string(temporal.missing_pub_date.size()) +
                            " relative temporal phrase(s) skipped: no publish date");

  std::vector<Geocode> geocodes;
  if (opts.geocoder) {
    for (const auto &span : merge_location_tokens(doc, opts.r_where)) {
      std::string phrase = span_text(doc, span);
      auto g = geocode(phrase, *opts.geocoder);
      if (!g) {
        sets.warnings.push_back("no geocode for '" + phrase + "'");
        continue;
      }
      g->span = span;
      geocodes.push_back(std::move(*g));
    }
  } else {
    sets.warnings.push_back("no geocoder configured: where candidates disabled");
  }

  EnvironmentCandidates env = extract_environment(doc, temporal.instances, geocodes);
  sets[Question::kWhen] = std::move(env.when);
  sets[Question::kWhere] = std::move(env.where);
  sets[Question::kWhy] = extract_cause(doc, opts.lexicons, opts.cause_constraint);
  sets[Question::kHow] = extract_method(doc, opts.lexicons);
  return sets;
}

void score_candidates(CandidateSets &sets, const AnnotatedDocument &doc,
                      const ScoringConfig &cfg) {
  auto pub = doc.source.publish_date;
  score_who(sets[Question::kWho], doc, cfg);
  score_what(sets[Question::kWhat], sets[Question::kWho]);
  score_when(sets[Question::kWhen], doc, pub, cfg);
  score_where(sets[Question::kWhere], doc, cfg);
  score_why(sets[Question::kWhy], doc, cfg);
  score_how(sets[Question::kHow], doc, cfg);

  const auto &who = sets[Question::kWho];
  auto action = select_best(who, cfg.answer_threshold[static_cast<size_t>(Question::kWho)]);
  combined_adjust_how(sets[Question::kHow], action ? &who[*action] : nullptr, doc.d_len(),
                      cfg);
}

namespace {

Answer make_answer(const AnnotatedDocument &doc, const Candidate &c,
                   const std::vector<LinkedEntity> &linked) {
  Answer a;
  a.candidate = c;
  const Sentence &s = doc.sentences.at(c.span.sentence);
  for (int i = c.span.begin; i < c.span.end; ++i) {
    const Token &t = s.tokens.at(i);
    a.tokens.push_back({t.text, t.pos, tree_path(s, i), t.ner});
  }
  for (const auto &e : linked)
    if (e.span.overlaps(c.span)) a.concepts.push_back(e);
  return a;
}

json span_json(const PhraseSpan &s) {
  return {{"sentence", s.sentence}, {"begin", s.begin}, {"end", s.end}};
}

json answer_json(const Answer &a) {
  const Candidate &c = a.candidate;
  json j = {{"text", c.text}, {"span", span_json(c.span)}, {"score", c.score}};
  json tokens = json::array();
  for (const auto &t : a.tokens)
    tokens.push_back({{"text", t.text}, {"pos", t.pos}, {"tree_path", t.tree_path},
                      {"ner", t.ner}});
  j["tokens"] = std::move(tokens);

  json canonical = nullptr;
  if (c.timex) {
    canonical = {{"type", "TIMEX3"},
                 {"kind", timex_kind_name(c.timex->kind)},
                 {"start", format_utc(c.timex->start)},
                 {"end", format_utc(c.timex->end)}};
  } else if (c.geocode) {
    const Geocode &g = *c.geocode;
    canonical = {{"type", "geocode"},
                 {"lat", g.lat},
                 {"lon", g.lon},
                 {"bbox",
                  {{"south", g.bbox.south},
                   {"west", g.bbox.west},
                   {"north", g.bbox.north},
                   {"east", g.bbox.east}}},
                 {"place_id", g.place_id},
                 {"display_name", g.display_name},
                 {"area_m2", g.area_m2}};
  }
  j["canonical"] = std::move(canonical);
  if (c.causal_type) j["causal_type"] = causal_type_name(*c.causal_type);
  if (c.method_type) j["method_type"] = method_type_name(*c.method_type);

  json concepts = json::array();
  for (const auto &e : a.concepts)
    concepts.push_back({{"span", span_json(e.span)},
                        {"concept_id", e.concept_id},
                        {"confidence", e.confidence}});
  j["concepts"] = std::move(concepts);
  return j;
}

}  // namespace

ExtractionResult run_pipeline(const AnnotatedDocument &doc, const PipelineOptions &opts) {
  opts.config.validate();
  CandidateSets sets = extract_candidates(doc, opts);
  score_candidates(sets, doc, opts.config);

  ExtractionResult result;
  result.metadata.coref_fallback = !doc.has_coref_layer;
  result.metadata.missing_pub_date = sets.missing_pub_date;
  result.metadata.warnings = sets.warnings;

  std::vector<LinkedEntity> linked;
  try {
    linked = link_entities(doc, opts.linker);
  } catch (const std::exception &e) {
    result.metadata.warnings.push_back(std::string("entity linking failed: ") + e.what());
  }

  for (Question q : kAllQuestions) {
    const auto &cands = sets[q];
    QuestionResult &qr = result.questions[static_cast<size_t>(q)];
    auto order = rank_candidates(cands);
    for (size_t i = 0; i < order.size() && i < opts.top_k; ++i)
      qr.candidates.push_back(make_answer(doc, cands[order[i]], linked));
    if (auto best = select_best(cands, opts.config.answer_threshold[static_cast<size_t>(q)]))
      qr.answer = make_answer(doc, cands[*best], linked);
  }
  return result;
}

json to_json(const ExtractionResult &result) {
  json questions = json::object();
  for (Question q : kAllQuestions) {
    const QuestionResult &qr = result[q];
    json cands = json::array();
    for (const auto &a : qr.candidates) cands.push_back(answer_json(a));
    questions[std::string(question_name(q))] = {
        {"answer", qr.answer ? answer_json(*qr.answer) : json(nullptr)},
        {"candidates", std::move(cands)}};
  }
  json missing = json::array();
  for (const auto &s : result.metadata.missing_pub_date) missing.push_back(span_json(s));
  return {{"version", "med-result-1"},
          {"questions", std::move(questions)},
          {"metadata",
           {{"coref_fallback", result.metadata.coref_fallback},
            {"missing_pub_date", std::move(missing)},
            {"warnings", result.metadata.warnings}}}};
}

std::string serialize_result(const ExtractionResult &result) {
  return to_json(result).dump(2) + "\n";
}

}  // namespace medex
