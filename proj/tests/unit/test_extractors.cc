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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>

#include "medex/errors.h"
#include "medex/extractors.h"
#include "medex/nlp_adapter.h"
#include "medex/pipeline.h"
#include "oracles.h"
#include "test_support.h"

using namespace medex;
using medex::testing::body_doc;

namespace {

const LexiconSet &lexicons() {
  static const LexiconSet lex = LexiconSet::load(default_lexicon_dir());
  return lex;
}

std::vector<std::string> words(const AnnotatedDocument &doc, const PhraseSpan &s) {
  std::vector<std::string> out;
  for (int i = s.begin; i < s.end; ++i) out.push_back(doc.sentences[s.sentence].tokens[i].text);
  return out;
}

std::vector<std::string> split(const std::string &s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

}  // namespace

TEST_CASE("question and type names") {
  for (Question q : kAllQuestions) CHECK(question_from_name(question_name(q)) == q);
  CHECK_FALSE(question_from_name("whom").has_value());
  CHECK(causal_type_name(CausalType::kAdverb) == "ADVERB");
  CHECK(method_type_name(MethodType::kAdjAdv) == "ADJ_ADV");
}

TEST_CASE("lexicons load, are lowercase and reject bad entries") {
  const auto &lex = lexicons();
  CHECK_FALSE(lex.causal_conjunctions.empty());
  CHECK_FALSE(lex.causative_adverbs.empty());
  CHECK_FALSE(lex.causative_verbs.empty());
  CHECK_FALSE(lex.copulative_conjunctions.empty());
  CHECK_NOTHROW(lex.validate());

  LexiconSet bad = lex;
  bad.causative_verbs.push_back("Cause");
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = lex;
  bad.causal_conjunctions.push_back("");
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(LexiconSet::load("/nonexistent/lexicons"), IoError);

  const auto &shipped = LexiconSet::shipped();
  CHECK(shipped.causal_conjunctions == lex.causal_conjunctions);
  CHECK(shipped.causative_verbs == lex.causative_verbs);
  CHECK(PipelineOptions{}.lexicons.copulative_conjunctions == lex.copulative_conjunctions);
}

TEST_CASE("action: subject NP holding a VP is discarded") {
  auto doc = body_doc(
      {"(ROOT (S (NP (NNP Mr.) (NNP Trump) (, ,) (VP (WP who) (VBD stormed) (NP (NNP Congress)) "
       "(NP (NNP Wednesday)))) (, ,) (VP (VBD said) (SBAR (S (NP (PRP it)) (VP (VBD was) "
       "(ADJP (JJ fine)))))) (. .)))"});
  CHECK(extract_action(doc).empty());
}

TEST_CASE("action: short truncation keeps the following PP") {
  auto doc = body_doc(
      {"(ROOT (S (NP (DT The) (NN microchip)) (VP (VBZ is) (NP (NN part)) (PP (IN of) (NP (NP "
       "(DT a) (JJR wider) (NN range)) (PP (IN of) (NP (NP (DT the) (NN company) (POS 's)) "
       "(NNS products)))))) (. .)))"});
  auto pairs = extract_action(doc);
  REQUIRE(pairs.size() == 1);
  CHECK(words(doc, pairs[0].who.span) == split("The microchip"));
  CHECK(words(doc, pairs[0].what.span) ==
        split("is part of a wider range of the company 's products"));
  CHECK(pairs[0].who.partner == pairs[0].what.partner);
}

TEST_CASE("action: long VP is cut after its first NP") {
  auto doc = body_doc(
      {"(ROOT (S (NP (NNP Taliban)) (VP (VBZ attacks) (NP (DT the) (JJ German) (NN consulate)) "
       "(PP (IN with) (NP (NN truck) (NN bomb))))))"});
  auto pairs = extract_action(doc);
  REQUIRE(pairs.size() == 1);
  CHECK(words(doc, pairs[0].what.span) == split("attacks the German consulate"));
  // The partner span starts at the first VP token.
  CHECK(pairs[0].what.span.begin == 1);
}

TEST_CASE("action: no NP-VP pattern yields nothing") {
  auto doc = body_doc({"(ROOT (S (VP (VB Run)) (. !)))"});
  CHECK(extract_action(doc).empty());
}

TEST_CASE("environment candidates keep document order") {
  auto doc = body_doc({"(ROOT (S (NP (NNP Paris|CITY)) (VP (VBD met) (NP (NNP Rome|CITY)))))"});
  CHECK(extract_environment(doc, {}, {}).when.empty());
  Geocode rome, paris;
  rome.span = {0, 2, 3};
  paris.span = {0, 0, 1};
  auto env = extract_environment(doc, {}, {rome, paris});
  REQUIRE(env.where.size() == 2);
  CHECK(env.where[0].text == "Paris");
  CHECK(env.where[1].text == "Rome");
  CHECK(env.where[0].geocode.has_value());
}

TEST_CASE("cause: conjunction marker") {
  auto doc = body_doc(
      {"(ROOT (S (NP (NNS Flights)) (VP (VBD were) (VP (VBN cancelled) (ADJP (JJ due) (PP (TO "
       "to) (NP (DT the) (NN storm))))))))"});
  auto why = extract_cause(doc, lexicons());
  REQUIRE(why.size() == 1);
  CHECK(words(doc, why[0].span) == split("the storm"));
  CHECK(why[0].causal_type == CausalType::kConjunction);
}

TEST_CASE("cause: adverb marker takes the clause to its left") {
  auto doc = body_doc(
      {"(ROOT (S (S (NP (DT The) (NN storm)) (VP (VBD intensified))) (: ;) (ADVP (RB "
       "therefore)) (, ,) (S (NP (NNS flights)) (VP (VBD were) (VP (VBN cancelled))))))"});
  auto why = extract_cause(doc, lexicons());
  REQUIRE(why.size() == 1);
  CHECK(words(doc, why[0].span) == split("The storm intensified"));
  CHECK(why[0].causal_type == CausalType::kAdverb);
}

TEST_CASE("cause: causative verb yields the last NP") {
  auto doc = body_doc(
      {"(ROOT (S (NP (DT The) (NN storm)) (VP (VBD caused|O|cause) (NP (JJ heavy) (NNS floods|O|flood)))))"});
  auto why = extract_cause(doc, lexicons());
  REQUIRE(why.size() == 1);
  CHECK(words(doc, why[0].span) == split("heavy floods"));
  CHECK(why[0].causal_type == CausalType::kVerb);

  // A constraint can veto the match.
  auto none = extract_cause(doc, lexicons(),
                            [](const Sentence &, const ParseNode &, const ParseNode &,
                               const ParseNode &) { return false; });
  CHECK(none.empty());
}

TEST_CASE("cause: no marker, no candidate") {
  auto doc = body_doc({"(ROOT (S (NP (NNP Kim)) (VP (VBD slept))))"});
  CHECK(extract_cause(doc, lexicons()).empty());
}

TEST_CASE("method: copulative clause") {
  auto doc = body_doc(
      {"(ROOT (S (NP (DT The) (NNS passengers)) (VP (VBD were) (VP (VBN injured) (SBAR (IN "
       "after) (S (NP (DT the) (NN train)) (VP (VBD came) (PP (IN off) (NP (DT the) (NNS "
       "tracks)))))))) (. .)))"});
  auto how = extract_method(doc, lexicons());
  bool found = false;
  for (const auto &c : how)
    if (c.method_type == MethodType::kCopulative) {
      CHECK(words(doc, c.span) == split("the train came off the tracks"));
      found = true;
    }
  CHECK(found);
}

TEST_CASE("method: adjective and adverb fallback") {
  auto doc = body_doc({"(ROOT (S (NP (PRP He)) (VP (VBD drove) (ADVP (RB quickly)))))"});
  auto how = extract_method(doc, lexicons());
  REQUIRE(how.size() == 1);
  CHECK(how[0].text == "quickly");
  CHECK(how[0].method_type == MethodType::kAdjAdv);
}

TEST_CASE("method: long copulative clause is capped") {
  std::string clause;
  for (int i = 0; i < 13; ++i) clause += " (NN n" + std::to_string(i) + ")";
  auto doc = body_doc({"(ROOT (S (NP (PRP It)) (VP (VBD ended) (SBAR (IN after) (S (NP (DT the)" +
                       clause + ") (VP (VBD stopped)))))))"});
  auto how = extract_method(doc, lexicons());
  REQUIRE_FALSE(how.empty());
  CHECK(how[0].method_type == MethodType::kCopulative);
  CHECK(how[0].span.size() == kHowMaxTokens);
  CHECK(how[0].span.begin == 3);
}

TEST_CASE("extraction is deterministic on the end-to-end fixture") {
  auto doc = annotate_offline(medex::testing::data_path("fixtures/fig1.json"));
  auto a = extract_action(doc);
  auto b = extract_action(doc);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].who.span == b[i].who.span);
    CHECK(a[i].what.span == b[i].what.span);
    CHECK(a[i].what.span.sentence == a[i].who.span.sentence);
  }
  auto m1 = extract_method(doc, lexicons());
  auto m2 = extract_method(doc, lexicons());
  REQUIRE(m1.size() == m2.size());
  for (size_t i = 0; i < m1.size(); ++i) CHECK(m1[i].span == m2[i].span);
}

TEST_CASE("how candidates never exceed the cap on random sentences") {
  std::mt19937 rng(2024);
  int total = 0;
  for (int i = 0; i < 1000; ++i) {
    auto doc = body_doc({medex::testing::random_parse_tree(rng)});
    for (const auto &c : extract_method(doc, lexicons())) {
      CHECK(c.span.size() <= kHowMaxTokens);
      CHECK(c.span.size() >= 1);
      ++total;
    }
  }
  CHECK(total > 0);
}
