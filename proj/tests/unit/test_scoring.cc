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

#include <cmath>
#include <random>

#include "medex/errors.h"
#include "medex/scoring.h"
#include "test_support.h"

using namespace medex;
using medex::testing::body_doc;
using medex::testing::dt;

namespace {

constexpr double kTol = 1e-12;

// n one-token-subject sentences; token 0 of sentence k is "w<k>".
AnnotatedDocument flat_doc(int n, std::vector<CorefChain> coref = {}) {
  std::vector<std::string> trees;
  for (int k = 0; k < n; ++k)
    trees.push_back("(ROOT (S (NP (NN w" + std::to_string(k) + ")) (VP (VBD left))))");
  AnnotatedDocument doc = body_doc(trees);
  doc.coref = std::move(coref);
  validate_document(doc);
  return doc;
}

Candidate cand(Question q, int sentence, int begin = 0, int end = 1) {
  Candidate c;
  c.question = q;
  c.span = {sentence, begin, end};
  return c;
}

CorefChain chain(std::initializer_list<int> sentences) {
  CorefChain c;
  for (int s : sentences) c.mentions.push_back({s, 0, 1});
  return c;
}

Geocode geo(double lat, double lon, BoundingBox box, std::string id, int sentence) {
  Geocode g;
  g.lat = lat;
  g.lon = lon;
  g.bbox = box;
  g.place_id = std::move(id);
  g.area_m2 = bbox_area(box);
  g.span = {sentence, 0, 1};
  return g;
}

}  // namespace

TEST_CASE("default configuration matches the published constants") {
  ScoringConfig cfg;
  CHECK(cfg.w_who == std::array<double, 3>{0.9, 0.095, 0.005});
  CHECK(cfg.w_when == std::array<double, 4>{0.24, 0.16, 0.4, 0.2});
  CHECK(cfg.w_where == std::array<double, 4>{0.37, 0.3, 0.3, 0.03});
  CHECK(cfg.w_why == std::array<double, 2>{0.56, 0.44});
  CHECK(cfg.w_how == std::array<double, 3>{0.23, 0.14, 0.63});
  CHECK(cfg.e_max == 2.5e6);
  CHECK(cfg.s_min == 60);
  CHECK(cfg.s_max == 3.1e7);
  CHECK(cfg.a_min == 225);
  CHECK(cfg.a_max == 5.3e11);
  CHECK(cfg.w0 == 1);
  CHECK(cfg.tc_conjunction == 1);
  CHECK(cfg.tc_adverb == 0.62);
  CHECK(cfg.tc_verb == 0.06);
  CHECK(cfg.tm_copulative == 1);
  CHECK(cfg.tm_adj_adv == 0.41);
  for (const auto &t : cfg.answer_threshold) CHECK_FALSE(t.has_value());
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config text round trip and rejection") {
  ScoringConfig cfg;
  cfg.w_why = {0.5, 0.5};
  cfg.answer_threshold[static_cast<size_t>(Question::kHow)] = 0.25;
  std::string text = cfg.to_text();
  CHECK(text.find("w_who.position = 0.9") != std::string::npos);
  CHECK(text.find("threshold.how = 0.25") != std::string::npos);
  CHECK(text.find("threshold.why = none") != std::string::npos);
  CHECK(ScoringConfig::from_text(text) == cfg);

  CHECK_THROWS_AS(ScoringConfig::from_text("w_who.bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(ScoringConfig::from_text("w_why.type = abc\n"), ConfigError);
  CHECK_THROWS_AS(ScoringConfig::from_text("no equals sign\n"), ConfigError);
  // Weights no longer sum to one.
  CHECK_THROWS_AS(ScoringConfig::from_text("w_why.type = 0.5\n"), ConfigError);
  CHECK_THROWS_AS(ScoringConfig::from_text("s_min = 1e9\n"), ConfigError);
  // Comments and blank lines are fine; unspecified keys keep defaults.
  CHECK(ScoringConfig::from_text("# nothing\n\n") == ScoringConfig{});
}

TEST_CASE("pos_factor") {
  CHECK(pos_factor(0, 10) == doctest::Approx(1.0).epsilon(kTol));
  CHECK(pos_factor(5, 10) == doctest::Approx(0.5).epsilon(kTol));
  CHECK(std::fabs(pos_factor(9, 10) - 0.1) < kTol);
  CHECK_THROWS_AS(pos_factor(0, 0), DegenerateDocument);
  CHECK_THROWS_AS(pos_factor(10, 10), RangeError);
  CHECK_THROWS_AS(pos_factor(-1, 10), RangeError);
  for (int d = 1; d < 40; ++d)
    for (int n = 1; n < d; ++n) CHECK(pos_factor(n, d) < pos_factor(n - 1, d));
}

TEST_CASE("score_who examples") {
  ScoringConfig cfg;
  SUBCASE("position 5 of 10, chain of 2 against a longest chain of 4, no entity") {
    auto doc = flat_doc(10, {chain({5, 6}), chain({0, 1, 2, 3})});
    std::vector<Candidate> who = {cand(Question::kWho, 5), cand(Question::kWho, 0)};
    score_who(who, doc, cfg);
    CHECK(std::fabs(who[0].score - 0.4975) < kTol);
  }
  SUBCASE("single candidate without entity in the first sentence") {
    auto doc = flat_doc(3);
    std::vector<Candidate> who = {cand(Question::kWho, 0)};
    score_who(who, doc, cfg);
    CHECK(std::fabs(who[0].score - 0.995) < kTol);
  }
  SUBCASE("all factors maximal") {
    auto doc = body_doc({"(ROOT (S (NP (NNP Kim|PERSON)) (VP (VBD left))))"});
    std::vector<Candidate> who = {cand(Question::kWho, 0)};
    score_who(who, doc, cfg);
    CHECK(std::fabs(who[0].score - 1.0) < kTol);
  }
  SUBCASE("empty list stays empty") {
    auto doc = flat_doc(2);
    std::vector<Candidate> who;
    score_who(who, doc, cfg);
    CHECK(who.empty());
    CHECK_FALSE(select_best(who).has_value());
  }
}

TEST_CASE("who frequency without a coreference layer counts head lemmas") {
  auto doc = body_doc({"(ROOT (S (NP (DT The) (NN rebel)) (VP (VBD fled))))",
                       "(ROOT (S (NP (NNS rebels|O|rebel)) (VP (VBD returned))))",
                       "(ROOT (S (NP (NN police)) (VP (VBD waited))))"});
  doc.has_coref_layer = false;
  CHECK(who_frequency(doc, cand(Question::kWho, 0, 0, 2)) == 2);
  CHECK(who_frequency(doc, cand(Question::kWho, 2, 0, 1)) == 1);
}

TEST_CASE("score_what copies partner scores") {
  Candidate who = cand(Question::kWho, 0);
  who.partner = 7;
  who.score = 0.4975;
  Candidate other = cand(Question::kWho, 1);
  other.partner = 8;
  other.score = 0.2;
  Candidate what = cand(Question::kWhat, 0, 1, 2);
  what.partner = 7;
  Candidate what2 = cand(Question::kWhat, 1, 1, 2);
  what2.partner = 8;
  std::vector<Candidate> whats = {what2, what};
  score_what(whats, {other, who});
  CHECK(whats[1].score == 0.4975);
  CHECK(whats[0].score == 0.2);
  CHECK(*select_best(std::vector<Candidate>{other, who}) == 1);
  CHECK(*select_best(whats) == 1);

  Candidate orphan = cand(Question::kWhat, 2, 1, 2);
  orphan.partner = 99;
  std::vector<Candidate> bad = {orphan};
  CHECK_THROWS_AS(score_what(bad, {who}), InvariantViolation);
}

TEST_CASE("score_when examples") {
  ScoringConfig cfg;
  DateTime pub = dt("2016-01-01T00:00:00Z");
  auto doc = flat_doc(4);
  auto timex = [&](double mid_offset, double duration, int sentence) {
    Timex3Instance t;
    t.kind = duration == 0 ? TimexKind::kExactTime : TimexKind::kDuration;
    auto start_s = static_cast<long long>(mid_offset - duration / 2);
    t.start = pub.utc + std::chrono::seconds(start_s);
    t.end = t.start + std::chrono::seconds(static_cast<long long>(duration));
    t.span = {sentence, 0, 1};
    Candidate c = cand(Question::kWhen, sentence);
    c.timex = t;
    return c;
  };
  SUBCASE("every factor maximal") {
    std::vector<Candidate> when = {timex(30, 60, 0)};
    score_when(when, doc, pub, cfg);
    CHECK(std::fabs(when[0].score - 1.0) < 1e-5);  // 30 s from publication
    std::vector<Candidate> exact = {timex(0, 60, 0)};
    exact[0].timex->start = pub.utc - std::chrono::seconds(30);
    exact[0].timex->end = pub.utc + std::chrono::seconds(30);
    score_when(exact, doc, pub, cfg);
    CHECK(std::fabs(exact[0].score - 1.0) < kTol);
  }
  SUBCASE("one year duration zeroes the duration factor") {
    CHECK(log_scale_factor(3.1e7, cfg.s_min, cfg.s_max) == 0.0);
    CHECK(log_scale_factor(1e9, cfg.s_min, cfg.s_max) == 0.0);
    CHECK(log_scale_factor(1, cfg.s_min, cfg.s_max) == 1.0);
  }
  SUBCASE("half a month away, one day long") {
    std::vector<Candidate> when = {timex(1.25e6, 86400, 0)};
    score_when(when, doc, pub, cfg);
    CHECK(std::fabs(when[0].score - 0.6894) < 1e-4);
  }
  SUBCASE("without a publish date closeness contributes nothing") {
    std::vector<Candidate> when = {timex(0, 86400, 0)};
    auto f = when_factors(when, doc.d_len(), std::nullopt, cfg);
    CHECK(f[0][2] == 0.0);
  }
  SUBCASE("similar instances count each other") {
    std::vector<Candidate> when = {timex(0, 86400, 0), timex(3600, 86400, 1),
                                   timex(1e6, 86400, 2)};
    auto f = when_factors(when, doc.d_len(), pub, cfg);
    CHECK(f[0][1] == 1.0);
    CHECK(f[1][1] == 1.0);
    CHECK(f[2][1] == 0.5);
  }
}

TEST_CASE("score_where examples") {
  ScoringConfig cfg;
  CHECK(log_scale_factor(225, cfg.a_min, cfg.a_max) == 1.0);
  CHECK(log_scale_factor(5.3e11, cfg.a_min, cfg.a_max) == 0.0);

  auto doc = flat_doc(2);
  Candidate city = cand(Question::kWhere, 0);
  city.geocode = geo(36.7, 67.1, {36.6, 67.0, 36.8, 67.2}, "city", 0);
  Candidate country = cand(Question::kWhere, 1);
  country.geocode = geo(33.9, 67.7, {29.4, 60.5, 38.5, 74.9}, "country", 1);
  std::vector<Candidate> where = {city, country};
  auto f = where_factors(where, doc.d_len(), cfg);
  CHECK(f[0][2] == 0.0);  // city contains nothing
  CHECK(f[1][2] == 1.0);  // country contains the city
  score_where(where, doc, cfg);
  double expected_city = 0.37 * 1 + 0.3 * 1 + 0.3 * 0 +
                         0.03 * log_scale_factor(city.geocode->area_m2, 225, 5.3e11);
  CHECK(std::fabs(where[0].score - expected_city) < kTol);
}

TEST_CASE("where frequency counts shared place ids") {
  ScoringConfig cfg;
  auto doc = flat_doc(3);
  BoundingBox box{36.6, 67.0, 36.8, 67.2};
  std::vector<Candidate> where;
  for (int s = 0; s < 3; ++s) {
    Candidate c = cand(Question::kWhere, s);
    c.geocode = geo(36.7, 67.1, box, s < 2 ? "same" : "other", s);
    if (s == 2) c.geocode->bbox = {10, 10, 11, 11}, c.geocode->lat = 10.5, c.geocode->lon = 10.5;
    where.push_back(c);
  }
  auto f = where_factors(where, doc.d_len(), cfg);
  CHECK(f[0][1] == 1.0);
  CHECK(f[1][1] == 1.0);
  CHECK(f[2][1] == 0.5);
  // Same place is not containment.
  CHECK(f[0][2] == 0.0);
}

TEST_CASE("score_why examples") {
  ScoringConfig cfg;
  auto doc = flat_doc(10);
  Candidate conj = cand(Question::kWhy, 0);
  conj.causal_type = CausalType::kConjunction;
  Candidate verb = cand(Question::kWhy, 5);
  verb.causal_type = CausalType::kVerb;
  Candidate adv = cand(Question::kWhy, 5);
  adv.causal_type = CausalType::kAdverb;
  std::vector<Candidate> why = {conj, verb, adv};
  score_why(why, doc, cfg);
  CHECK(std::fabs(why[0].score - 1.0) < kTol);
  CHECK(std::fabs(why[1].score - 0.3064) < kTol);
  CHECK(std::fabs((why[2].score - why[1].score) - 0.44 * (0.62 - 0.06)) < kTol);
}

TEST_CASE("score_how examples") {
  ScoringConfig cfg;
  SUBCASE("position 4 of 8, half the top frequency, adjective run") {
    std::vector<std::string> trees;
    trees.push_back("(ROOT (S (NP (NN car)) (VP (VBD went) (ADVP (RB fast)))))");
    trees.push_back("(ROOT (S (NP (NN bus)) (VP (VBD went) (ADVP (RB fast)))))");
    for (int k = 2; k < 8; ++k)
      trees.push_back(k == 4 ? "(ROOT (S (NP (NN he)) (VP (VBD drove) (ADVP (RB quickly)))))"
                             : "(ROOT (S (NP (NN x" + std::to_string(k) + ")) (VP (VBD sat))))");
    auto doc = body_doc(trees);
    Candidate slow = cand(Question::kHow, 4, 2, 3);
    slow.method_type = MethodType::kAdjAdv;
    Candidate fast = cand(Question::kHow, 0, 2, 3);
    fast.method_type = MethodType::kAdjAdv;
    std::vector<Candidate> how = {slow, fast};
    score_how(how, doc, cfg);
    CHECK(std::fabs(how[0].score - 0.4433) < kTol);
  }
  SUBCASE("first sentence, top frequency, copulative") {
    auto doc = body_doc({"(ROOT (S (NP (NN it)) (VP (VBD fell) (SBAR (IN after) (S (NP (NN rain)) (VP (VBD came)))))))"});
    Candidate c = cand(Question::kHow, 0, 3, 5);
    c.method_type = MethodType::kCopulative;
    Candidate d = c;
    d.method_type = MethodType::kAdjAdv;
    std::vector<Candidate> how = {c};
    score_how(how, doc, cfg);
    CHECK(std::fabs(how[0].score - 1.0) < kTol);
    std::vector<Candidate> both = {d, c};
    score_how(both, doc, cfg);
    CHECK(*select_best(both) == 1);
  }
}

TEST_CASE("combined how adjustment") {
  ScoringConfig cfg;
  Candidate action = cand(Question::kWho, 0);
  SUBCASE("same sentence leaves the score unchanged") {
    Candidate h = cand(Question::kHow, 0);
    h.score = 0.37;
    std::vector<Candidate> how = {h};
    combined_adjust_how(how, &action, 10, cfg);
    CHECK(how[0].score == 0.37);
  }
  SUBCASE("distance 5 of 10 from 0.6") {
    Candidate h = cand(Question::kHow, 5);
    h.score = 0.6;
    std::vector<Candidate> how = {h};
    combined_adjust_how(how, &action, 10, cfg);
    CHECK(std::fabs(how[0].score - 0.1) < kTol);
  }
  SUBCASE("nearer candidate wins a tie") {
    Candidate far = cand(Question::kHow, 3);
    Candidate near = cand(Question::kHow, 1);
    far.score = near.score = 0.5;
    std::vector<Candidate> how = {far, near};
    combined_adjust_how(how, &action, 10, cfg);
    CHECK(*select_best(how) == 1);
  }
  SUBCASE("no action skips the adjustment") {
    Candidate h = cand(Question::kHow, 4);
    h.score = 0.5;
    std::vector<Candidate> how = {h};
    combined_adjust_how(how, nullptr, 10, cfg);
    CHECK(how[0].score == 0.5);
  }
}

TEST_CASE("select_best") {
  auto scored = [](std::vector<std::pair<double, int>> v) {
    std::vector<Candidate> out;
    for (auto [s, sent] : v) {
      Candidate c = cand(Question::kWho, sent);
      c.score = s;
      out.push_back(c);
    }
    return out;
  };
  CHECK(*select_best(scored({{0.2, 0}, {0.9, 1}, {0.4, 2}})) == 1);
  CHECK(*select_best(scored({{0.7, 5}, {0.7, 2}})) == 1);
  CHECK_FALSE(select_best(scored({{0.3, 0}, {0.1, 1}}), 0.5).has_value());
  CHECK(*select_best(scored({{0.6, 0}}), 0.5) == 0);

  auto longer = scored({{0.7, 2}, {0.7, 2}});
  longer[1].span.end = 3;
  CHECK(*select_best(longer) == 1);

  auto order = rank_candidates(scored({{0.2, 0}, {0.9, 1}, {0.4, 2}}));
  CHECK(order == std::vector<size_t>{1, 2, 0});
}

TEST_CASE("factor monotonicity and score bounds on random inputs") {
  ScoringConfig cfg;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 2000; ++i) {
    double a = u(rng) * 5e6, b = u(rng) * 5e6;
    if (a > b) std::swap(a, b);
    CHECK(closeness_factor(a, cfg.e_max) >= closeness_factor(b, cfg.e_max));
    double d1 = std::exp(u(rng) * 20), d2 = std::exp(u(rng) * 20);
    if (d1 > d2) std::swap(d1, d2);
    CHECK(log_scale_factor(d1, cfg.s_min, cfg.s_max) >= log_scale_factor(d2, cfg.s_min, cfg.s_max));
    double a1 = std::exp(u(rng) * 30), a2 = std::exp(u(rng) * 30);
    if (a1 > a2) std::swap(a1, a2);
    CHECK(log_scale_factor(a1, cfg.a_min, cfg.a_max) >= log_scale_factor(a2, cfg.a_min, cfg.a_max));

    for (Question q : {Question::kWho, Question::kWhen, Question::kWhere, Question::kWhy,
                       Question::kHow}) {
      auto w = cfg.weights(q);
      std::vector<double> f(w.size());
      for (double &x : f) x = u(rng);
      double s = weighted_sum(w, f);
      CHECK(s >= 0.0);
      CHECK(s <= 1.0 + 1e-15);
    }
  }
}

TEST_CASE("select_best is invariant to positive rescaling") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 500; ++i) {
    std::vector<Candidate> cs;
    int n = 1 + static_cast<int>(u(rng) * 8);
    for (int k = 0; k < n; ++k) {
      Candidate c = cand(Question::kWhy, k);
      c.score = u(rng);
      cs.push_back(c);
    }
    auto before = select_best(cs);
    double k = 0.01 + u(rng) * 100;
    for (auto &c : cs) c.score *= k;
    CHECK(select_best(cs) == before);
  }
}
