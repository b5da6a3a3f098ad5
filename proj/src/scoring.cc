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

#include "medex/scoring.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>
#include <utility>

#include "medex/errors.h"
#include "medex/textutil.h"

namespace medex {

// --- Config ------------------------------------------------------------------

namespace {

constexpr std::string_view kWhoFactors[] = {"position", "frequency", "named_entity"};
constexpr std::string_view kWhenFactors[] = {"position", "frequency", "closeness",
                                             "duration"};
constexpr std::string_view kWhereFactors[] = {"position", "frequency", "containment",
                                              "specificity"};
constexpr std::string_view kWhyFactors[] = {"position", "type"};
constexpr std::string_view kHowFactors[] = {"position", "frequency", "type"};

template <typename Config, typename Fn>
void for_each_entry(Config &cfg, Fn &&fn) {
  auto vec = [&](std::string_view prefix, auto &weights, Question q) {
    auto names = factor_names(q);
    for (size_t i = 0; i < weights.size(); ++i)
      fn(std::string(prefix) + "." + std::string(names[i]), weights[i]);
  };
  vec("w_who", cfg.w_who, Question::kWho);
  vec("w_when", cfg.w_when, Question::kWhen);
  vec("w_where", cfg.w_where, Question::kWhere);
  vec("w_why", cfg.w_why, Question::kWhy);
  vec("w_how", cfg.w_how, Question::kHow);
  fn("e_max", cfg.e_max);
  fn("s_min", cfg.s_min);
  fn("s_max", cfg.s_max);
  fn("a_min", cfg.a_min);
  fn("a_max", cfg.a_max);
  fn("w0", cfg.w0);
  fn("tc.conjunction", cfg.tc_conjunction);
  fn("tc.adverb", cfg.tc_adverb);
  fn("tc.verb", cfg.tc_verb);
  fn("tm.copulative", cfg.tm_copulative);
  fn("tm.adj_adv", cfg.tm_adj_adv);
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

}  // namespace

std::span<const std::string_view> factor_names(Question q) {
  switch (q) {
    case Question::kWho:
    case Question::kWhat: return kWhoFactors;
    case Question::kWhen: return kWhenFactors;
    case Question::kWhere: return kWhereFactors;
    case Question::kWhy: return kWhyFactors;
    case Question::kHow: return kHowFactors;
  }
  return kWhoFactors;
}

std::span<const double> ScoringConfig::weights(Question q) const {
  return const_cast<ScoringConfig *>(this)->weights(q);
}

std::span<double> ScoringConfig::weights(Question q) {
  switch (q) {
    case Question::kWho:
    case Question::kWhat: return w_who;
    case Question::kWhen: return w_when;
    case Question::kWhere: return w_where;
    case Question::kWhy: return w_why;
    case Question::kHow: return w_how;
  }
  return w_who;
}

void ScoringConfig::validate() const {
  for (Question q : {Question::kWho, Question::kWhen, Question::kWhere, Question::kWhy,
                     Question::kHow}) {
    auto w = weights(q);
    double sum = 0;
    for (double x : w) {
      if (!(x >= 0)) throw ConfigError("negative weight for " + std::string(question_name(q)));
      sum += x;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
      throw ConfigError("weights for " + std::string(question_name(q)) + " sum to " +
                        format_double(sum) + ", not 1");
  }
  if (!(e_max > 0)) throw ConfigError("e_max must be positive");
  if (!(0 < s_min && s_min < s_max)) throw ConfigError("need 0 < s_min < s_max");
  if (!(0 < a_min && a_min < a_max)) throw ConfigError("need 0 < a_min < a_max");
  if (!(w0 >= 0)) throw ConfigError("w0 must be non-negative");
}

std::string ScoringConfig::to_text() const {
  std::ostringstream out;
  out << "# medex scoring configuration\n";
  for_each_entry(*this, [&](const std::string &key, const double &v) {
    out << key << " = " << format_double(v) << "\n";
  });
  for (Question q : kAllQuestions) {
    const auto &t = answer_threshold[static_cast<size_t>(q)];
    out << "threshold." << question_name(q) << " = "
        << (t ? format_double(*t) : std::string("none")) << "\n";
  }
  return out.str();
}

ScoringConfig ScoringConfig::from_text(std::string_view text) {
  ScoringConfig cfg;
  std::map<std::string, double *> slots;
  for_each_entry(cfg, [&](const std::string &key, double &v) { slots[key] = &v; });

  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string_view body = trim(line);
    if (body.empty()) continue;
    auto eq = body.find('=');
    auto where = "line " + std::to_string(lineno) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    std::string key(trim(body.substr(0, eq)));
    std::string_view value = trim(body.substr(eq + 1));
    if (key.rfind("threshold.", 0) == 0) {
      auto q = question_from_name(key.substr(10));
      if (!q) throw ConfigError(where + "unknown key '" + key + "'");
      auto &slot = cfg.answer_threshold[static_cast<size_t>(*q)];
      if (value == "none") {
        slot.reset();
      } else if (auto v = parse_double(value)) {
        slot = *v;
      } else {
        throw ConfigError(where + "bad value for '" + key + "'");
      }
      continue;
    }
    auto it = slots.find(key);
    if (it == slots.end()) throw ConfigError(where + "unknown key '" + key + "'");
    auto v = parse_double(value);
    if (!v) throw ConfigError(where + "bad value for '" + key + "'");
    *it->second = *v;
  }
  cfg.validate();
  return cfg;
}

// --- Factor primitives -------------------------------------------------------

double pos_factor(int n_pos, int d_len) {
  if (d_len <= 0) throw DegenerateDocument("document has no sentences");
  if (n_pos < 0 || n_pos >= d_len)
    throw RangeError("sentence position " + std::to_string(n_pos) +
                     " outside document of length " + std::to_string(d_len));
  return 1.0 - static_cast<double>(n_pos) / static_cast<double>(d_len);
}

double closeness_factor(double delta_s, double e_max) {
  return 1.0 - std::min(1.0, std::fabs(delta_s) / e_max);
}

double log_scale_factor(double value, double lo, double hi) {
  double v = std::clamp(value, lo, hi);
  return 1.0 - std::min(1.0, (std::log(v) - std::log(lo)) / (std::log(hi) - std::log(lo)));
}

double weighted_sum(std::span<const double> weights, std::span<const double> factors) {
  double s = 0;
  for (size_t i = 0; i < weights.size() && i < factors.size(); ++i)
    s += weights[i] * factors[i];
  return s;
}

// --- Frequencies -------------------------------------------------------------

int who_frequency(const AnnotatedDocument &doc, const Candidate &c) {
  if (doc.has_coref_layer) {
    int best_overlap = 0;
    int best_size = 1;
    for (const auto &chain : doc.coref) {
      for (const auto &m : chain.mentions) {
        if (!m.overlaps(c.span)) continue;
        int overlap = std::min(m.end, c.span.end) - std::max(m.begin, c.span.begin);
        int size = static_cast<int>(chain.mentions.size());
        if (overlap > best_overlap || (overlap == best_overlap && size > best_size)) {
          best_overlap = overlap;
          best_size = size;
        }
      }
    }
    return best_size;
  }
  // Head lemma: the last noun of the phrase, else its last token.
  const auto &tokens = doc.sentences.at(c.span.sentence).tokens;
  int head = c.span.end - 1;
  for (int i = c.span.end - 1; i >= c.span.begin; --i) {
    if (is_noun_tag(tokens[i].pos)) {
      head = i;
      break;
    }
  }
  std::string lemma = to_lower(tokens[head].lemma);
  int count = 0;
  for (const auto &s : doc.sentences)
    for (const auto &t : s.tokens)
      if (to_lower(t.lemma) == lemma) ++count;
  return std::max(count, 1);
}

int how_frequency(const AnnotatedDocument &doc, const Candidate &c) {
  const auto &tokens = doc.sentences.at(c.span.sentence).tokens;
  int best = 1;
  for (int i = c.span.begin; i < c.span.end; ++i) {
    const Token &t = tokens[i];
    if (!(is_noun_tag(t.pos) || is_verb_tag(t.pos) || is_adjective_tag(t.pos) ||
          is_adverb_tag(t.pos)))
      continue;
    std::string lemma = to_lower(t.lemma);
    int count = 0;
    for (const auto &s : doc.sentences)
      for (const auto &u : s.tokens)
        if (to_lower(u.lemma) == lemma) ++count;
    best = std::max(best, count);
  }
  return best;
}

bool timex_similar(const Timex3Instance &a, const Timex3Instance &b) {
  constexpr auto kDay = std::chrono::seconds{86400};
  auto abs = [](std::chrono::seconds d) { return d < d.zero() ? -d : d; };
  return abs(a.start - b.start) <= kDay && abs(a.end - b.end) <= kDay;
}

double seconds_from_publication(const Timex3Instance &t, const DateTime &pub) {
  return t.midpoint() - static_cast<double>(pub.utc.time_since_epoch().count());
}

// --- Factor matrices ---------------------------------------------------------

namespace {

std::vector<double> normalize_by_max(const std::vector<double> &counts) {
  double mx = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
  std::vector<double> out(counts.size(), 0.0);
  if (mx > 0)
    for (size_t i = 0; i < counts.size(); ++i) out[i] = counts[i] / mx;
  return out;
}

}  // namespace

FactorMatrix who_factors(const std::vector<Candidate> &who, const AnnotatedDocument &doc) {
  std::vector<double> nf;
  for (const auto &c : who) nf.push_back(who_frequency(doc, c));
  auto f = normalize_by_max(nf);
  FactorMatrix m;
  for (size_t i = 0; i < who.size(); ++i) {
    const auto &c = who[i];
    const auto &tokens = doc.sentences.at(c.span.sentence).tokens;
    bool ne = false;
    for (int k = c.span.begin; k < c.span.end && !ne; ++k) ne = tokens[k].is_entity();
    m.push_back({pos_factor(c.span.sentence, doc.d_len()), f[i], ne ? 1.0 : 0.0});
  }
  return m;
}

FactorMatrix when_factors(const std::vector<Candidate> &when, int d_len,
                          const std::optional<DateTime> &pub, const ScoringConfig &cfg) {
  std::vector<double> nf(when.size(), 0.0);
  for (size_t i = 0; i < when.size(); ++i)
    for (size_t j = 0; j < when.size(); ++j)
      if (when[i].timex && when[j].timex && timex_similar(*when[i].timex, *when[j].timex))
        nf[i] += 1;
  auto f = normalize_by_max(nf);
  FactorMatrix m;
  for (size_t i = 0; i < when.size(); ++i) {
    const auto &c = when[i];
    if (!c.timex) throw InvariantViolation("when candidate without TIMEX3 instance");
    double close = pub ? closeness_factor(seconds_from_publication(*c.timex, *pub), cfg.e_max)
                       : 0.0;
    double dur = log_scale_factor(c.timex->duration_seconds(), cfg.s_min, cfg.s_max);
    m.push_back({pos_factor(c.span.sentence, d_len), f[i], close, dur});
  }
  return m;
}

FactorMatrix where_factors(const std::vector<Candidate> &where, int d_len,
                           const ScoringConfig &cfg) {
  const size_t n = where.size();
  std::vector<double> nf(n, 0.0), ne(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    if (!where[i].geocode) throw InvariantViolation("where candidate without geocode");
    const Geocode &gi = *where[i].geocode;
    for (size_t j = 0; j < n; ++j) {
      const Geocode &gj = *where[j].geocode;
      bool same_place = !gi.place_id.empty() && gi.place_id == gj.place_id;
      if (same_place || i == j) {
        nf[i] += 1;
      } else if (gi.bbox.contains(gj.lat, gj.lon)) {
        ne[i] += 1;
      }
    }
  }
  auto f = normalize_by_max(nf);
  auto e = normalize_by_max(ne);
  FactorMatrix m;
  for (size_t i = 0; i < n; ++i) {
    double spec = log_scale_factor(where[i].geocode->area_m2, cfg.a_min, cfg.a_max);
    m.push_back({pos_factor(where[i].span.sentence, d_len), f[i], e[i], spec});
  }
  return m;
}

FactorMatrix why_factors(const std::vector<Candidate> &why, int d_len,
                         const ScoringConfig &cfg) {
  FactorMatrix m;
  for (const auto &c : why) {
    if (!c.causal_type) throw InvariantViolation("why candidate without causal type");
    double tc = *c.causal_type == CausalType::kConjunction ? cfg.tc_conjunction
                : *c.causal_type == CausalType::kAdverb    ? cfg.tc_adverb
                                                           : cfg.tc_verb;
    m.push_back({pos_factor(c.span.sentence, d_len), tc});
  }
  return m;
}

FactorMatrix how_factors(const std::vector<Candidate> &how, const AnnotatedDocument &doc,
                         const ScoringConfig &cfg) {
  std::vector<double> nf;
  for (const auto &c : how) nf.push_back(how_frequency(doc, c));
  auto f = normalize_by_max(nf);
  FactorMatrix m;
  for (size_t i = 0; i < how.size(); ++i) {
    const auto &c = how[i];
    if (!c.method_type) throw InvariantViolation("how candidate without method type");
    double tm = *c.method_type == MethodType::kCopulative ? cfg.tm_copulative : cfg.tm_adj_adv;
    m.push_back({pos_factor(c.span.sentence, doc.d_len()), f[i], tm});
  }
  return m;
}

void apply_weights(std::vector<Candidate> &cands, const FactorMatrix &factors,
                   std::span<const double> weights) {
  for (size_t i = 0; i < cands.size(); ++i)
    cands[i].score = weighted_sum(weights, factors.at(i));
}

// --- Per-question ------------------------------------------------------------

void score_who(std::vector<Candidate> &who, const AnnotatedDocument &doc,
               const ScoringConfig &cfg) {
  apply_weights(who, who_factors(who, doc), cfg.w_who);
}

void score_what(std::vector<Candidate> &what, const std::vector<Candidate> &who) {
  std::map<int, double> by_pair;
  for (const auto &w : who)
    if (w.partner) by_pair[*w.partner] = w.score;
  for (auto &c : what) {
    auto it = c.partner ? by_pair.find(*c.partner) : by_pair.end();
    if (it == by_pair.end())
      throw InvariantViolation("what candidate '" + c.text + "' has no who partner");
    c.score = it->second;
  }
}

void score_when(std::vector<Candidate> &when, const AnnotatedDocument &doc,
                const std::optional<DateTime> &pub, const ScoringConfig &cfg) {
  apply_weights(when, when_factors(when, doc.d_len(), pub, cfg), cfg.w_when);
}

void score_where(std::vector<Candidate> &where, const AnnotatedDocument &doc,
                 const ScoringConfig &cfg) {
  apply_weights(where, where_factors(where, doc.d_len(), cfg), cfg.w_where);
}

void score_why(std::vector<Candidate> &why, const AnnotatedDocument &doc,
               const ScoringConfig &cfg) {
  apply_weights(why, why_factors(why, doc.d_len(), cfg), cfg.w_why);
}

void score_how(std::vector<Candidate> &how, const AnnotatedDocument &doc,
               const ScoringConfig &cfg) {
  apply_weights(how, how_factors(how, doc, cfg), cfg.w_how);
}

void combined_adjust_how(std::vector<Candidate> &how, const Candidate *best_action,
                         int d_len, const ScoringConfig &cfg) {
  if (!best_action) return;
  if (d_len <= 0) throw DegenerateDocument("document has no sentences");
  for (auto &c : how) {
    int dist = std::abs(c.span.sentence - best_action->span.sentence);
    c.score -= cfg.w0 * static_cast<double>(dist) / static_cast<double>(d_len);
  }
}

bool outranks(double score_a, const PhraseSpan &a, double score_b, const PhraseSpan &b) {
  double tol = 1e-12 * std::max(std::fabs(score_a), std::fabs(score_b));
  if (std::fabs(score_a - score_b) > tol) return score_a > score_b;
  if (a.sentence != b.sentence) return a.sentence < b.sentence;
  if (a.begin != b.begin) return a.begin < b.begin;
  return a.size() > b.size();
}

namespace {

bool ranks_before(const Candidate &a, const Candidate &b) {
  return outranks(a.score, a.span, b.score, b.span);
}

}  // namespace

std::vector<size_t> rank_candidates(const std::vector<Candidate> &cands) {
  std::vector<size_t> idx(cands.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](size_t a, size_t b) { return ranks_before(cands[a], cands[b]); });
  return idx;
}

std::optional<size_t> select_best(const std::vector<Candidate> &cands,
                                  std::optional<double> threshold) {
  if (cands.empty()) return std::nullopt;
  size_t best = 0;
  for (size_t i = 1; i < cands.size(); ++i)
    if (ranks_before(cands[i], cands[best])) best = i;
  if (threshold && cands[best].score < *threshold) return std::nullopt;
  return best;
}

}  // namespace medex
