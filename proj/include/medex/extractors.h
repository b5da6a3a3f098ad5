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

// Candidate extraction chains: action (who/what), environment (when/where),
// cause (why) and method (how). All functions are pure over the document.

#ifndef MEDEX_EXTRACTORS_H_
#define MEDEX_EXTRACTORS_H_

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "medex/canonicalize.h"
#include "medex/docmodel.h"

namespace medex {

enum class Question { kWho, kWhat, kWhen, kWhere, kWhy, kHow };

inline constexpr std::array<Question, 6> kAllQuestions = {
    Question::kWho,   Question::kWhat, Question::kWhen,
    Question::kWhere, Question::kWhy,  Question::kHow};

std::string_view question_name(Question q);
std::optional<Question> question_from_name(std::string_view name);

enum class CausalType { kConjunction, kAdverb, kVerb };
enum class MethodType { kCopulative, kAdjAdv };

std::string_view causal_type_name(CausalType t);
std::string_view method_type_name(MethodType t);

struct Candidate {
  Question question = Question::kWho;
  PhraseSpan span;
  std::string text;
  std::optional<CausalType> causal_type;
  std::optional<MethodType> method_type;
  std::optional<Timex3Instance> timex;
  std::optional<Geocode> geocode;
  // WHO and WHAT candidates: index of the action pair they belong to.
  std::optional<int> partner;
  double score = 0;
};

struct LexiconSet {
  // Entries are lowercase; multi-word entries are space separated.
  std::vector<std::string> causal_conjunctions;
  std::vector<std::string> causative_adverbs;
  std::vector<std::string> causative_verbs;
  std::vector<std::string> copulative_conjunctions;

  // Reads causal_conjunctions.txt, causative_adverbs.txt,
  // causative_verbs.txt and copulative_conjunctions.txt from `dir`. One term
  // per line, '#' starts a comment. Throws IoError / ConfigError.
  static LexiconSet load(const std::string &dir);

  // The lexicons shipped in data/lexicons, compiled into the library.
  static const LexiconSet &shipped();

  // Throws ConfigError when an entry is empty or not lowercase.
  void validate() const;
};

// Directory holding the shipped lexicons: $MEDEX_DATA_DIR/lexicons when set,
// else the build-time data directory.
std::string default_data_dir();
std::string default_lexicon_dir();

// ---------------------------------------------------------------------------

inline constexpr int kWhatMinTokens = 3;
inline constexpr int kHowMaxTokens = 10;

struct ActionPair {
  Candidate who;
  Candidate what;
};

// Per sentence: the first NP child of the clause whose next sibling is a VP.
// Such an NP with a VP child disqualifies the sentence. The VP is cut after
// its first NP child unless that cut leaves at most kWhatMinTokens tokens and
// the NP is followed by a PP, in which case the PP is kept.
std::vector<ActionPair> extract_action(const AnnotatedDocument &doc);

struct EnvironmentCandidates {
  std::vector<Candidate> when;
  std::vector<Candidate> where;
};

EnvironmentCandidates extract_environment(const AnnotatedDocument &doc,
                                          const std::vector<Timex3Instance> &timexes,
                                          const std::vector<Geocode> &geocodes);

// Extra filter for NP-VP-NP causative patterns; receives the sentence, the
// subject NP, the VP and the object NP. Returning false rejects the match.
using CausalVerbConstraint = std::function<bool(
    const Sentence &, const ParseNode &, const ParseNode &, const ParseNode &)>;

std::vector<Candidate> extract_cause(const AnnotatedDocument &doc,
                                     const LexiconSet &lex,
                                     const CausalVerbConstraint &constraint = {});

std::vector<Candidate> extract_method(const AnnotatedDocument &doc,
                                      const LexiconSet &lex);

}  // namespace medex

#endif  // MEDEX_EXTRACTORS_H_
