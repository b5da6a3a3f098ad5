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

// Candidate scoring.
//
// Every question scores a candidate as a weighted sum of factors in [0, 1].
// Factors are computed once per candidate set (they depend on the other
// candidates, e.g. through frequency normalization) and are independent of
// the weights, which lets the learner re-rank under many weightings cheaply.
//
//   who   position, frequency (coreference chain size), named entity
//   what  copies its partner's who score
//   when  position, frequency, closeness to publication, duration
//   where position, frequency (same place id), containment, specificity
//   why   position, causal type reliability
//   how   position, frequency (lemma count), method type reliability
//
// How scores are then lowered by their sentence distance to the chosen
// action (who/what) candidate.

#ifndef MEDEX_SCORING_H_
#define MEDEX_SCORING_H_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "medex/docmodel.h"
#include "medex/extractors.h"

namespace medex {

struct ScoringConfig {
  std::array<double, 3> w_who{0.9, 0.095, 0.005};
  std::array<double, 4> w_when{0.24, 0.16, 0.4, 0.2};
  std::array<double, 4> w_where{0.37, 0.3, 0.3, 0.03};
  std::array<double, 2> w_why{0.56, 0.44};
  std::array<double, 3> w_how{0.23, 0.14, 0.63};

  double e_max = 2.5e6;   // s, about one month
  double s_min = 60;      // s
  double s_max = 3.1e7;   // s, about one year
  double a_min = 225;     // m^2
  double a_max = 5.3e11;  // m^2
  double w0 = 1;

  double tc_conjunction = 1;
  double tc_adverb = 0.62;
  double tc_verb = 0.06;
  double tm_copulative = 1;
  double tm_adj_adv = 0.41;

  // Minimum winning score per question, indexed by Question. Unset = none.
  std::array<std::optional<double>, 6> answer_threshold{};

  // Weight vector of a question (what shares who's weights).
  std::span<const double> weights(Question q) const;
  std::span<double> weights(Question q);

  // Throws ConfigError when a weight vector is negative or does not sum to 1
  // (within 1e-9), or a constant pair is out of order.
  void validate() const;

  // Flat "key = value" text, one entry per line, '#' comments.
  std::string to_text() const;
  // Starts from defaults; unknown keys and bad values throw ConfigError.
  static ScoringConfig from_text(std::string_view text);

  friend bool operator==(const ScoringConfig &, const ScoringConfig &) = default;
};

// Factor names per question, in weight order.
std::span<const std::string_view> factor_names(Question q);

// --- Factor primitives ---------------------------------------------------

// 1 - n_pos / d_len. Throws DegenerateDocument when d_len <= 0 and
// RangeError when n_pos is outside [0, d_len).
double pos_factor(int n_pos, int d_len);

// 1 - min(1, |delta_s| / e_max).
double closeness_factor(double delta_s, double e_max);

// 1 - min(1, (ln v - ln lo) / (ln hi - ln lo)), with v clamped to [lo, hi].
double log_scale_factor(double value, double lo, double hi);

double weighted_sum(std::span<const double> weights, std::span<const double> factors);

// Row i holds the factors of candidate i, in the order of factor_names().
using FactorMatrix = std::vector<std::vector<double>>;

// n_f for who candidates: size of the coreference chain with the largest
// overlap, 1 when none; without a coreference layer, the number of tokens
// sharing the lemma of the phrase's head noun.
int who_frequency(const AnnotatedDocument &doc, const Candidate &c);

// n_f for how candidates: the highest document frequency (by lemma) among
// the phrase's content tokens.
int how_frequency(const AnnotatedDocument &doc, const Candidate &c);

// Two instances are similar when both their starts and their ends are at
// most 24 h apart.
bool timex_similar(const Timex3Instance &a, const Timex3Instance &b);

// Seconds between the candidate's midpoint and the publication instant.
double seconds_from_publication(const Timex3Instance &t, const DateTime &pub);

FactorMatrix who_factors(const std::vector<Candidate> &who, const AnnotatedDocument &doc);
FactorMatrix when_factors(const std::vector<Candidate> &when, int d_len,
                          const std::optional<DateTime> &pub, const ScoringConfig &cfg);
FactorMatrix where_factors(const std::vector<Candidate> &where, int d_len,
                           const ScoringConfig &cfg);
FactorMatrix why_factors(const std::vector<Candidate> &why, int d_len,
                         const ScoringConfig &cfg);
FactorMatrix how_factors(const std::vector<Candidate> &how, const AnnotatedDocument &doc,
                         const ScoringConfig &cfg);

// Writes weighted sums into each candidate's score.
void apply_weights(std::vector<Candidate> &cands, const FactorMatrix &factors,
                   std::span<const double> weights);

// --- Per-question scoring ----------------------------------------------------

void score_who(std::vector<Candidate> &who, const AnnotatedDocument &doc,
               const ScoringConfig &cfg);
// Copies each partner's who score. Throws InvariantViolation for a what
// candidate without a who partner.
void score_what(std::vector<Candidate> &what, const std::vector<Candidate> &who);
void score_when(std::vector<Candidate> &when, const AnnotatedDocument &doc,
                const std::optional<DateTime> &pub, const ScoringConfig &cfg);
void score_where(std::vector<Candidate> &where, const AnnotatedDocument &doc,
                 const ScoringConfig &cfg);
void score_why(std::vector<Candidate> &why, const AnnotatedDocument &doc,
               const ScoringConfig &cfg);
void score_how(std::vector<Candidate> &how, const AnnotatedDocument &doc,
               const ScoringConfig &cfg);

// s - w0 * |n_pos(c) - n_pos(action)| / d_len. A no-op without an action.
void combined_adjust_how(std::vector<Candidate> &how, const Candidate *best_action,
                         int d_len, const ScoringConfig &cfg);

// Index of the best candidate: highest score, then earlier position, then
// longer span. nullopt when empty or below `threshold`.
std::optional<size_t> select_best(const std::vector<Candidate> &cands,
                                  std::optional<double> threshold = std::nullopt);

// The ordering behind select_best: true when (score_a, a) ranks before
// (score_b, b). Scores within a relative 1e-12 count as tied.
bool outranks(double score_a, const PhraseSpan &a, double score_b, const PhraseSpan &b);

// Candidate indices sorted best first, using select_best's ordering.
std::vector<size_t> rank_candidates(const std::vector<Candidate> &cands);

}  // namespace medex

#endif  // MEDEX_SCORING_H_
