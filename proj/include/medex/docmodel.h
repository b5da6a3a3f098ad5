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

// Annotated-document model and its "med-1" JSON interchange format.
//
// A document is the concatenation of up to three sections (title, lead,
// body). Sentences are indexed globally across sections in that order, so a
// sentence index doubles as the document position used by scoring. Token
// character offsets are relative to the raw text of the section the sentence
// came from.

#ifndef MEDEX_DOCMODEL_H_
#define MEDEX_DOCMODEL_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "medex/timeutil.h"

namespace medex {

inline constexpr std::string_view kInterchangeVersion = "med-1";

struct Token {
  int index_in_sentence = 0;
  std::string text;
  std::string lemma;
  std::string pos;
  std::string ner = "O";
  int char_begin = 0;
  int char_end = 0;

  bool is_entity() const { return ner != "O"; }
  friend bool operator==(const Token &, const Token &) = default;
};

// Constituency tree node. Leaves are preterminals: their label is the POS
// tag and `token` indexes the sentence's token list. begin/end are the token
// range covered by the node; they are derived on load, not serialized.
struct ParseNode {
  std::string label;
  std::vector<ParseNode> children;
  int token = -1;
  int begin = 0;
  int end = 0;

  bool is_leaf() const { return token >= 0; }
  int size() const { return end - begin; }
  friend bool operator==(const ParseNode &, const ParseNode &) = default;
};

// Half-open token range inside one sentence.
struct PhraseSpan {
  int sentence = 0;
  int begin = 0;
  int end = 0;

  int size() const { return end - begin; }
  bool contains(const PhraseSpan &o) const {
    return sentence == o.sentence && begin <= o.begin && o.end <= end;
  }
  bool overlaps(const PhraseSpan &o) const {
    return sentence == o.sentence && begin < o.end && o.begin < end;
  }
  friend bool operator==(const PhraseSpan &, const PhraseSpan &) = default;
};

struct CorefChain {
  std::vector<PhraseSpan> mentions;
  int representative = 0;
  friend bool operator==(const CorefChain &, const CorefChain &) = default;
};

enum class Section { kTitle, kLead, kBody };

std::string_view section_name(Section s);
std::optional<Section> section_from_name(std::string_view name);

struct ArticleInput {
  std::string title;
  std::optional<std::string> lead;
  std::string body;
  std::optional<DateTime> publish_date;

  bool empty() const;
  friend bool operator==(const ArticleInput &, const ArticleInput &) = default;
};

struct ArticleSection {
  Section kind;
  std::string text;
};

// Non-empty sections in title, lead, body order.
std::vector<ArticleSection> concat_sections(const ArticleInput &input);

struct Sentence {
  std::vector<Token> tokens;
  ParseNode parse;
  std::optional<Section> section;
  friend bool operator==(const Sentence &, const Sentence &) = default;
};

struct AnnotatedDocument {
  ArticleInput source;
  std::vector<Sentence> sentences;
  std::vector<CorefChain> coref;
  // False when the annotation source provided no coreference layer at all.
  bool has_coref_layer = true;

  int d_len() const { return static_cast<int>(sentences.size()); }
  const Token &token(int sentence, int index) const {
    return sentences[sentence].tokens[index];
  }
  // Raw text of a section, or empty when the document lacks it.
  std::string_view section_text(Section s) const;

  friend bool operator==(const AnnotatedDocument &,
                         const AnnotatedDocument &) = default;
};

// Parses and validates a med-1 document. Throws SchemaError naming the
// offending path.
AnnotatedDocument load_annotated(std::string_view json_text);

std::string serialize_annotated(const AnnotatedDocument &doc);

// Checks every document invariant; throws SchemaError. Also (re)computes the
// derived begin/end ranges of each parse tree.
void validate_document(AnnotatedDocument &doc);

// Original text of a span. Uses the section's raw text when available,
// otherwise joins tokens with the spacing implied by their offsets. Throws
// RangeError for spans outside the document.
std::string span_text(const AnnotatedDocument &doc, const PhraseSpan &span);

// Lowercased lemmas (falling back to text) of the span's tokens.
std::vector<std::string> span_lemmas(const AnnotatedDocument &doc,
                                     const PhraseSpan &span);

// Root-to-leaf label path of a token, e.g. "S/NP/NNP". A top "ROOT" node is
// omitted.
std::string tree_path(const Sentence &sentence, int token);

// Recomputes begin/end of every node; returns the number of leaves seen.
// Throws SchemaError when leaves are not 0..n-1 in order.
int assign_spans(ParseNode &root, const std::string &path);

// Parses a bracketed tree such as "(ROOT (S (NP (NNP Kim)) (VP (VBD left))))".
// Leaves are numbered in order; the words are appended to `words` and their
// preterminal labels to `tags` when non-null.
ParseNode parse_bracketed(std::string_view text,
                          std::vector<std::string> *words = nullptr,
                          std::vector<std::string> *tags = nullptr);

std::string to_bracketed(const ParseNode &node,
                         const std::vector<Token> &tokens);

}  // namespace medex

#endif  // MEDEX_DOCMODEL_H_
