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

#include "medex/extractors.h"

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <tuple>

#include "medex/errors.h"
#include "medex/textutil.h"

#ifndef MEDEX_DATA_DIR
#define MEDEX_DATA_DIR "data"
#endif

namespace medex {

std::string_view question_name(Question q) {
  switch (q) {
    case Question::kWho: return "who";
    case Question::kWhat: return "what";
    case Question::kWhen: return "when";
    case Question::kWhere: return "where";
    case Question::kWhy: return "why";
    case Question::kHow: return "how";
  }
  return "who";
}

std::optional<Question> question_from_name(std::string_view name) {
  for (Question q : kAllQuestions)
    if (question_name(q) == name) return q;
  return std::nullopt;
}

std::string_view causal_type_name(CausalType t) {
  switch (t) {
    case CausalType::kConjunction: return "CONJUNCTION";
    case CausalType::kAdverb: return "ADVERB";
    case CausalType::kVerb: return "VERB";
  }
  return "CONJUNCTION";
}

std::string_view method_type_name(MethodType t) {
  return t == MethodType::kCopulative ? "COPULATIVE" : "ADJ_ADV";
}

// --- Lexicons ----------------------------------------------------------------

namespace {

std::vector<std::string> parse_term_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string_view term = trim(line);
    if (term.empty()) continue;
    // Collapse inner whitespace runs.
    std::string norm;
    for (const auto &w : simple_tokenize(term, false)) {
      if (!norm.empty()) norm += ' ';
      norm += w;
    }
    out.push_back(norm);
  }
  return out;
}

std::vector<std::string> read_term_list(const std::string &path) {
  return parse_term_list(read_file(path));
}

}  // namespace

namespace embedded {
extern const std::string_view kCausalConjunctions;
extern const std::string_view kCausativeAdverbs;
extern const std::string_view kCausativeVerbs;
extern const std::string_view kCopulativeConjunctions;
}  // namespace embedded

const LexiconSet &LexiconSet::shipped() {
  static const LexiconSet lex = [] {
    LexiconSet l;
    l.causal_conjunctions = parse_term_list(embedded::kCausalConjunctions);
    l.causative_adverbs = parse_term_list(embedded::kCausativeAdverbs);
    l.causative_verbs = parse_term_list(embedded::kCausativeVerbs);
    l.copulative_conjunctions = parse_term_list(embedded::kCopulativeConjunctions);
    l.validate();
    return l;
  }();
  return lex;
}

LexiconSet LexiconSet::load(const std::string &dir) {
  LexiconSet lex;
  lex.causal_conjunctions = read_term_list(dir + "/causal_conjunctions.txt");
  lex.causative_adverbs = read_term_list(dir + "/causative_adverbs.txt");
  lex.causative_verbs = read_term_list(dir + "/causative_verbs.txt");
  lex.copulative_conjunctions = read_term_list(dir + "/copulative_conjunctions.txt");
  lex.validate();
  return lex;
}

void LexiconSet::validate() const {
  auto check = [](const std::vector<std::string> &list, const char *name) {
    for (const auto &term : list) {
      if (term.empty()) throw ConfigError(std::string(name) + ": empty entry");
      if (to_lower(term) != term)
        throw ConfigError(std::string(name) + ": entry '" + term + "' is not lowercase");
    }
  };
  check(causal_conjunctions, "causal_conjunctions");
  check(causative_adverbs, "causative_adverbs");
  check(causative_verbs, "causative_verbs");
  check(copulative_conjunctions, "copulative_conjunctions");
}

std::string default_data_dir() {
  if (const char *env = std::getenv("MEDEX_DATA_DIR"); env && *env) return env;
  return MEDEX_DATA_DIR;
}

std::string default_lexicon_dir() { return default_data_dir() + "/lexicons"; }

// --- Helpers -----------------------------------------------------------------

namespace {

const ParseNode &clause_root(const ParseNode &root) {
  const ParseNode *node = &root;
  while (node->label == "ROOT" && node->children.size() == 1 &&
         !node->children.front().is_leaf())
    node = &node->children.front();
  return *node;
}

std::vector<std::vector<std::string>> split_terms(const std::vector<std::string> &terms) {
  std::vector<std::vector<std::string>> out;
  for (const auto &t : terms) out.push_back(simple_tokenize(t, true));
  // Longest first so "as a result of" wins over "result of".
  std::stable_sort(out.begin(), out.end(),
                   [](const auto &a, const auto &b) { return a.size() > b.size(); });
  return out;
}

// Length of the longest term starting at token i, or 0.
int match_at(const std::vector<Token> &tokens, int i,
             const std::vector<std::vector<std::string>> &terms) {
  for (const auto &term : terms) {
    if (term.empty() || i + static_cast<int>(term.size()) > static_cast<int>(tokens.size()))
      continue;
    bool ok = true;
    for (size_t k = 0; k < term.size() && ok; ++k)
      ok = to_lower(tokens[i + k].text) == term[k];
    if (ok) return static_cast<int>(term.size());
  }
  return 0;
}

// Shrinks the range past leading/trailing punctuation.
PhraseSpan trim_punct(const Sentence &s, PhraseSpan span) {
  while (span.begin < span.end && is_punct_tag(s.tokens[span.begin].pos)) ++span.begin;
  while (span.end > span.begin && is_punct_tag(s.tokens[span.end - 1].pos)) --span.end;
  return span;
}

// Parent of the preterminal for `token`.
const ParseNode *leaf_parent(const ParseNode &root, int token) {
  const ParseNode *node = &root;
  const ParseNode *parent = nullptr;
  while (node && !node->is_leaf()) {
    const ParseNode *next = nullptr;
    for (const auto &c : node->children)
      if (c.begin <= token && token < c.end) next = &c;
    parent = node;
    node = next;
  }
  return parent;
}

Candidate make_candidate(const AnnotatedDocument &doc, Question q, PhraseSpan span) {
  Candidate c;
  c.question = q;
  c.span = span;
  c.text = span_text(doc, span);
  return c;
}

template <typename Fn>
void visit_nodes(const ParseNode &node, Fn &&fn) {
  fn(node);
  for (const auto &c : node.children) visit_nodes(c, fn);
}

}  // namespace

// --- Action ------------------------------------------------------------------

std::vector<ActionPair> extract_action(const AnnotatedDocument &doc) {
  std::vector<ActionPair> out;
  for (int si = 0; si < doc.d_len(); ++si) {
    const Sentence &s = doc.sentences[si];
    const ParseNode &clause = clause_root(s.parse);
    const auto &kids = clause.children;
    for (size_t k = 0; k + 1 < kids.size(); ++k) {
      const ParseNode &np = kids[k];
      const ParseNode &vp = kids[k + 1];
      if (np.label != "NP" || vp.label != "VP") continue;

      bool has_child_vp = std::any_of(np.children.begin(), np.children.end(),
                                      [](const ParseNode &c) { return c.label == "VP"; });
      if (!has_child_vp) {
        int what_end = vp.end;
        for (size_t j = 0; j < vp.children.size(); ++j) {
          const ParseNode &child = vp.children[j];
          if (child.label != "NP") continue;
          what_end = child.end;
          bool pp_follows = j + 1 < vp.children.size() && vp.children[j + 1].label == "PP";
          if (what_end - vp.begin <= kWhatMinTokens && pp_follows)
            what_end = vp.children[j + 1].end;
          break;
        }
        int pair = static_cast<int>(out.size());
        ActionPair ap{make_candidate(doc, Question::kWho, {si, np.begin, np.end}),
                      make_candidate(doc, Question::kWhat, {si, vp.begin, what_end})};
        ap.who.partner = pair;
        ap.what.partner = pair;
        out.push_back(std::move(ap));
      }
      break;  // only the first NP-VP pair of a sentence is considered
    }
  }
  return out;
}

// --- Environment -------------------------------------------------------------

EnvironmentCandidates extract_environment(const AnnotatedDocument &doc,
                                          const std::vector<Timex3Instance> &timexes,
                                          const std::vector<Geocode> &geocodes) {
  auto by_position = [](const PhraseSpan &a, const PhraseSpan &b) {
    return std::tie(a.sentence, a.begin, a.end) < std::tie(b.sentence, b.begin, b.end);
  };
  EnvironmentCandidates env;
  for (const auto &t : timexes) {
    Candidate c = make_candidate(doc, Question::kWhen, t.span);
    c.timex = t;
    env.when.push_back(std::move(c));
  }
  for (const auto &g : geocodes) {
    Candidate c = make_candidate(doc, Question::kWhere, g.span);
    c.geocode = g;
    env.where.push_back(std::move(c));
  }
  auto sort = [&](std::vector<Candidate> &v) {
    std::stable_sort(v.begin(), v.end(), [&](const Candidate &a, const Candidate &b) {
      return by_position(a.span, b.span);
    });
  };
  sort(env.when);
  sort(env.where);
  return env;
}

// --- Cause -------------------------------------------------------------------

std::vector<Candidate> extract_cause(const AnnotatedDocument &doc, const LexiconSet &lex,
                                     const CausalVerbConstraint &constraint) {
  const auto conjunctions = split_terms(lex.causal_conjunctions);
  const auto adverbs = split_terms(lex.causative_adverbs);
  const auto verbs = split_terms(lex.causative_verbs);
  std::vector<Candidate> out;
  auto emit = [&](PhraseSpan span, CausalType type) {
    if (span.size() <= 0) return;
    for (const auto &c : out)
      if (c.span == span && c.causal_type == type) return;
    Candidate c = make_candidate(doc, Question::kWhy, span);
    c.causal_type = type;
    out.push_back(std::move(c));
  };

  for (int si = 0; si < doc.d_len(); ++si) {
    const Sentence &s = doc.sentences[si];
    const int n = static_cast<int>(s.tokens.size());

    for (int i = 0; i < n;) {
      if (int len = match_at(s.tokens, i, conjunctions)) {
        emit(trim_punct(s, {si, i + len, n}), CausalType::kConjunction);
        i += len;
      } else if (int alen = match_at(s.tokens, i, adverbs)) {
        emit(trim_punct(s, {si, 0, i}), CausalType::kAdverb);
        i += alen;
      } else {
        ++i;
      }
    }

    // NP VP(verb ... NP) patterns anywhere in the tree.
    visit_nodes(s.parse, [&](const ParseNode &parent) {
      const auto &kids = parent.children;
      for (size_t k = 0; k + 1 < kids.size(); ++k) {
        const ParseNode &np1 = kids[k];
        const ParseNode &vp = kids[k + 1];
        if (np1.label != "NP" || vp.label != "VP") continue;
        const auto &vk = vp.children;
        for (size_t v = 0; v < vk.size(); ++v) {
          if (!vk[v].is_leaf() || !is_verb_tag(vk[v].label)) continue;
          const Token &verb = s.tokens[vk[v].token];
          std::string lemma = to_lower(verb.lemma.empty() ? verb.text : verb.lemma);
          const ParseNode *np2 = nullptr;
          for (const auto &term : verbs) {
            if (term.front() != lemma) continue;
            if (term.size() == 1) {
              // verb NP
              for (size_t j = v + 1; j < vk.size() && !np2; ++j)
                if (vk[j].label == "NP") np2 = &vk[j];
            } else if (term.size() == 2 && v + 1 < vk.size() &&
                       vk[v + 1].label == "PP" && !vk[v + 1].children.empty() &&
                       vk[v + 1].children.front().is_leaf() &&
                       to_lower(s.tokens[vk[v + 1].children.front().token].text) ==
                           term[1]) {
              // verb particle NP, e.g. "lead to", "result in"
              for (const auto &pc : vk[v + 1].children)
                if (pc.label == "NP") np2 = &pc;
            }
            if (np2) break;
          }
          if (np2 && (!constraint || constraint(s, np1, vp, *np2)))
            emit({si, np2->begin, np2->end}, CausalType::kVerb);
          break;  // only the head verb of the VP
        }
      }
    });
  }
  return out;
}

// --- Method ------------------------------------------------------------------

std::vector<Candidate> extract_method(const AnnotatedDocument &doc, const LexiconSet &lex) {
  const auto copulatives = split_terms(lex.copulative_conjunctions);
  std::vector<Candidate> out;
  auto emit = [&](PhraseSpan span, MethodType type) {
    if (span.size() <= 0) return;
    if (span.size() > kHowMaxTokens) span.end = span.begin + kHowMaxTokens;
    for (const auto &c : out)
      if (c.span == span && c.method_type == type) return;
    Candidate c = make_candidate(doc, Question::kHow, span);
    c.method_type = type;
    out.push_back(std::move(c));
  };

  for (int si = 0; si < doc.d_len(); ++si) {
    const Sentence &s = doc.sentences[si];
    const int n = static_cast<int>(s.tokens.size());
    for (int i = 0; i < n;) {
      int len = match_at(s.tokens, i, copulatives);
      if (!len) {
        ++i;
        continue;
      }
      // The clause to the right of the marker, bounded by the constituent
      // that holds the marker.
      const ParseNode *parent = leaf_parent(s.parse, i + len - 1);
      int end = parent ? parent->end : n;
      if (end <= i + len) end = n;
      emit(trim_punct(s, {si, i + len, end}), MethodType::kCopulative);
      i += len;
    }
  }

  for (int si = 0; si < doc.d_len(); ++si) {
    const Sentence &s = doc.sentences[si];
    const int n = static_cast<int>(s.tokens.size());
    for (int i = 0; i < n;) {
      auto modifier = [&](int k) {
        return is_adjective_tag(s.tokens[k].pos) || is_adverb_tag(s.tokens[k].pos);
      };
      if (!modifier(i)) {
        ++i;
        continue;
      }
      int j = i;
      while (j < n && modifier(j)) ++j;
      emit({si, i, j}, MethodType::kAdjAdv);
      i = j;
    }
  }
  return out;
}

}  // namespace medex
