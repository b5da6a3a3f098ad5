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

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "medex/docmodel.h"
#include "medex/errors.h"
#include "test_support.h"

using namespace medex;
using nlohmann::json;
using medex::testing::body_doc;
using medex::testing::data_path;

namespace {

std::string read_file(const std::string &path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json fig1_json() { return json::parse(read_file(data_path("fixtures/fig1.json"))); }

// Loads a mutated copy and returns the SchemaError path, or "" when it loads.
std::string error_path(const json &j) {
  try {
    load_annotated(j.dump());
  } catch (const SchemaError &e) {
    return e.path();
  }
  return "";
}

}  // namespace

TEST_CASE("fixture loads and round-trips") {
  auto doc = load_annotated(read_file(data_path("fixtures/fig1.json")));
  CHECK(doc.d_len() == 4);
  CHECK(doc.has_coref_layer);
  CHECK(doc.source.publish_date.has_value());
  auto again = load_annotated(serialize_annotated(doc));
  CHECK(again == doc);
  CHECK(serialize_annotated(again) == serialize_annotated(doc));
}

TEST_CASE("parse trees carry derived token ranges") {
  auto doc = body_doc({"(ROOT (S (NP (NNP Kim)) (VP (VBD left) (NP (DT the) (NN room)))))"});
  const ParseNode &s = doc.sentences[0].parse.children[0];
  CHECK(s.begin == 0);
  CHECK(s.end == 4);
  CHECK(s.children[1].begin == 1);
  CHECK(s.children[1].children[1].size() == 2);
  CHECK(tree_path(doc.sentences[0], 0) == "S/NP/NNP");
  CHECK(tree_path(doc.sentences[0], 3) == "S/VP/NP/NN");
  CHECK(to_bracketed(doc.sentences[0].parse, doc.sentences[0].tokens) ==
        "(ROOT (S (NP (NNP Kim)) (VP (VBD left) (NP (DT the) (NN room)))))");
}

TEST_CASE("span text uses the section's raw text") {
  auto doc = load_annotated(read_file(data_path("fixtures/fig1.json")));
  CHECK(span_text(doc, {0, 0, 1}) == "Taliban");
  CHECK(span_text(doc, {0, 1, 4}) == "attacks German consulate");
  CHECK_THROWS_AS(span_text(doc, {9, 0, 1}), RangeError);
  CHECK_THROWS_AS(span_text(doc, {0, 2, 2}), RangeError);
  CHECK_THROWS_AS(span_text(doc, {0, 0, 999}), RangeError);
  auto lemmas = span_lemmas(doc, {0, 1, 2});
  REQUIRE(lemmas.size() == 1);
  CHECK(lemmas[0] == "attack");
}

TEST_CASE("sections concatenate in title, lead, body order") {
  ArticleInput a;
  a.title = "T";
  a.body = "B";
  auto secs = concat_sections(a);
  REQUIRE(secs.size() == 2);
  CHECK(secs[0].kind == Section::kTitle);
  CHECK(secs[1].kind == Section::kBody);
  a.lead = "L";
  secs = concat_sections(a);
  REQUIRE(secs.size() == 3);
  CHECK(secs[1].text == "L");
  a.title.clear();
  a.lead = "";
  secs = concat_sections(a);
  REQUIRE(secs.size() == 1);
  CHECK(ArticleInput{}.empty());
  CHECK(section_from_name(section_name(Section::kLead)) == Section::kLead);
  CHECK_FALSE(section_from_name("footer").has_value());
}

TEST_CASE("schema violations name the offending path") {
  json j = fig1_json();
  CHECK(error_path(j) == "");

  json bad = j;
  bad["version"] = "med-0";
  CHECK(error_path(bad) == "$.version");

  bad = j;
  bad["sentences"][1]["tokens"][2]["char_end"] = 0;
  CHECK(error_path(bad) == "$.sentences[1].tokens[2].char_end");

  bad = j;
  bad["sentences"][0]["tokens"][0].erase("pos");
  CHECK(error_path(bad) == "$.sentences[0].tokens[0].pos");

  bad = j;
  bad["sentences"][0]["tokens"].erase(bad["sentences"][0]["tokens"].size() - 1);
  CHECK(error_path(bad).rfind("$.sentences[0].parse", 0) == 0);

  bad = j;
  bad["sentences"] = json::array();
  CHECK(error_path(bad) == "$.sentences");

  bad = j;
  bad["coref"][0]["representative"] = 7;
  CHECK(error_path(bad) == "$.coref[0].representative");

  bad = j;
  bad["coref"][0]["mentions"][0]["sentence"] = 40;
  CHECK(error_path(bad) == "$.coref[0].mentions[0].sentence");

  bad = j;
  bad["publish_date"] = "yesterday";
  CHECK(error_path(bad) == "$.publish_date");

  bad = j;
  bad["sentences"][0]["section"] = "footer";
  CHECK(error_path(bad) == "$.sentences[0].section");

  bad = j;
  std::swap(bad["sentences"][0], bad["sentences"][3]);
  CHECK(error_path(bad) != "");

  CHECK_THROWS_AS(load_annotated("{\"version\": "), SchemaError);
  CHECK_THROWS_AS(load_annotated("[]"), SchemaError);
}

TEST_CASE("a missing coref layer is recorded") {
  json j = fig1_json();
  j.erase("coref");
  auto doc = load_annotated(j.dump());
  CHECK_FALSE(doc.has_coref_layer);
  CHECK(doc.coref.empty());
}

TEST_CASE("bracketed parser rejects malformed trees") {
  CHECK_THROWS_AS(parse_bracketed("(ROOT (S (NP (NNP Kim))"), SchemaError);
  CHECK_THROWS_AS(parse_bracketed("ROOT"), SchemaError);
  std::vector<std::string> words, tags;
  auto root = parse_bracketed("(ROOT (S (NP (PRP It)) (VP (VBZ works))))", &words, &tags);
  CHECK(words == std::vector<std::string>{"It", "works"});
  CHECK(tags == std::vector<std::string>{"PRP", "VBZ"});
  CHECK(root.children[0].children[1].children[0].token == 1);
}
