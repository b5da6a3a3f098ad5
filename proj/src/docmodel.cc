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

#include "medex/docmodel.h"

#include <algorithm>
#include <cctype>

#include "json.hpp"
#include "medex/errors.h"
#include "medex/textutil.h"

namespace medex {

using nlohmann::json;

std::string_view section_name(Section s) {
  switch (s) {
    case Section::kTitle: return "title";
    case Section::kLead: return "lead";
    case Section::kBody: return "body";
  }
  return "body";
}

std::optional<Section> section_from_name(std::string_view name) {
  if (name == "title") return Section::kTitle;
  if (name == "lead") return Section::kLead;
  if (name == "body") return Section::kBody;
  return std::nullopt;
}

bool ArticleInput::empty() const {
  return title.empty() && body.empty() && (!lead || lead->empty());
}

std::vector<ArticleSection> concat_sections(const ArticleInput &input) {
  std::vector<ArticleSection> out;
  if (!input.title.empty()) out.push_back({Section::kTitle, input.title});
  if (input.lead && !input.lead->empty())
    out.push_back({Section::kLead, *input.lead});
  if (!input.body.empty()) out.push_back({Section::kBody, input.body});
  return out;
}

std::string_view AnnotatedDocument::section_text(Section s) const {
  switch (s) {
    case Section::kTitle: return source.title;
    case Section::kLead: return source.lead ? std::string_view(*source.lead)
                                            : std::string_view();
    case Section::kBody: return source.body;
  }
  return {};
}

// --- Trees -----------------------------------------------------------------

namespace {

int assign_spans_rec(ParseNode &node, int next, const std::string &path) {
  if (node.label.empty()) throw SchemaError(path + ".label", "empty label");
  if (node.is_leaf()) {
    if (!node.children.empty())
      throw SchemaError(path, "leaf node must not have children");
    if (node.token != next)
      throw SchemaError(path + ".token",
                        "leaf order mismatch: expected token " +
                            std::to_string(next) + ", found " +
                            std::to_string(node.token));
    node.begin = next;
    node.end = next + 1;
    return next + 1;
  }
  if (node.children.empty())
    throw SchemaError(path + ".children", "internal node without children");
  node.begin = next;
  for (size_t i = 0; i < node.children.size(); ++i) {
    next = assign_spans_rec(node.children[i], next,
                            path + ".children[" + std::to_string(i) + "]");
  }
  node.end = next;
  return next;
}

}  // namespace

int assign_spans(ParseNode &root, const std::string &path) {
  return assign_spans_rec(root, 0, path);
}

ParseNode parse_bracketed(std::string_view text, std::vector<std::string> *words,
                          std::vector<std::string> *tags) {
  size_t pos = 0;
  int next_token = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  };
  auto read_atom = [&] {
    size_t start = pos;
    while (pos < text.size() && text[pos] != '(' && text[pos] != ')' &&
           !std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
    return std::string(text.substr(start, pos - start));
  };
  auto fail = [&](const std::string &msg) {
    return SchemaError("parse@" + std::to_string(pos), msg);
  };

  auto parse_node = [&](auto &self) -> ParseNode {
    skip_ws();
    if (pos >= text.size() || text[pos] != '(') throw fail("expected '('");
    ++pos;
    skip_ws();
    ParseNode node;
    node.label = read_atom();
    skip_ws();
    if (pos < text.size() && text[pos] != '(' && text[pos] != ')') {
      // Preterminal: (TAG word)
      std::string word = read_atom();
      if (node.label.empty()) throw fail("preterminal without tag");
      node.token = next_token++;
      if (words) words->push_back(word);
      if (tags) tags->push_back(node.label);
    } else {
      while (true) {
        skip_ws();
        if (pos >= text.size()) throw fail("unbalanced brackets");
        if (text[pos] == ')') break;
        node.children.push_back(self(self));
      }
      if (node.label.empty()) node.label = "ROOT";
      if (node.children.empty()) throw fail("empty constituent");
    }
    skip_ws();
    if (pos >= text.size() || text[pos] != ')') throw fail("expected ')'");
    ++pos;
    return node;
  };

  ParseNode root = parse_node(parse_node);
  skip_ws();
  if (pos != text.size()) throw fail("trailing characters after tree");
  assign_spans(root, "parse");
  return root;
}

std::string to_bracketed(const ParseNode &node,
                         const std::vector<Token> &tokens) {
  if (node.is_leaf())
    return "(" + node.label + " " + tokens.at(node.token).text + ")";
  std::string out = "(" + node.label;
  for (const auto &c : node.children) out += " " + to_bracketed(c, tokens);
  return out + ")";
}

std::string tree_path(const Sentence &sentence, int token) {
  std::vector<std::string_view> labels;
  const ParseNode *node = &sentence.parse;
  while (node) {
    labels.push_back(node->label);
    if (node->is_leaf()) break;
    const ParseNode *next = nullptr;
    for (const auto &c : node->children) {
      if (c.begin <= token && token < c.end) {
        next = &c;
        break;
      }
    }
    node = next;
  }
  std::string out;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (i == 0 && labels[i] == "ROOT" && labels.size() > 1) continue;
    if (!out.empty()) out += '/';
    out += labels[i];
  }
  return out;
}

// --- JSON ------------------------------------------------------------------

namespace {

const json &field(const json &obj, const char *key, const std::string &path) {
  if (!obj.is_object()) throw SchemaError(path, "expected object");
  auto it = obj.find(key);
  if (it == obj.end())
    throw SchemaError(path + "." + key, "missing field");
  return *it;
}

std::string string_field(const json &obj, const char *key,
                         const std::string &path) {
  const json &v = field(obj, key, path);
  if (!v.is_string()) throw SchemaError(path + "." + key, "expected string");
  return v.get<std::string>();
}

int int_field(const json &obj, const char *key, const std::string &path) {
  const json &v = field(obj, key, path);
  if (!v.is_number_integer())
    throw SchemaError(path + "." + key, "expected integer");
  return v.get<int>();
}

const json &array_field(const json &obj, const char *key,
                        const std::string &path) {
  const json &v = field(obj, key, path);
  if (!v.is_array()) throw SchemaError(path + "." + key, "expected array");
  return v;
}

ParseNode node_from_json(const json &j, const std::string &path) {
  ParseNode node;
  node.label = string_field(j, "label", path);
  bool has_token = j.contains("token");
  bool has_children = j.contains("children");
  if (has_token == has_children)
    throw SchemaError(path, "node needs exactly one of 'children' or 'token'");
  if (has_token) {
    node.token = int_field(j, "token", path);
    if (node.token < 0) throw SchemaError(path + ".token", "negative index");
  } else {
    const json &kids = array_field(j, "children", path);
    for (size_t i = 0; i < kids.size(); ++i)
      node.children.push_back(
          node_from_json(kids[i], path + ".children[" + std::to_string(i) + "]"));
  }
  return node;
}

json node_to_json(const ParseNode &node) {
  json j;
  j["label"] = node.label;
  if (node.is_leaf()) {
    j["token"] = node.token;
  } else {
    json kids = json::array();
    for (const auto &c : node.children) kids.push_back(node_to_json(c));
    j["children"] = std::move(kids);
  }
  return j;
}

PhraseSpan span_from_json(const json &j, const std::string &path) {
  return {int_field(j, "sentence", path), int_field(j, "begin", path),
          int_field(j, "end", path)};
}

}  // namespace

AnnotatedDocument load_annotated(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw SchemaError("$", std::string("malformed JSON: ") + e.what());
  }
  const std::string top = "$";
  std::string version = string_field(root, "version", top);
  if (version != kInterchangeVersion)
    throw SchemaError("$.version", "unsupported version '" + version + "'");

  AnnotatedDocument doc;
  doc.source.title = root.contains("title") && root["title"].is_string()
                         ? root["title"].get<std::string>()
                         : std::string();
  if (root.contains("lead") && !root["lead"].is_null()) {
    if (!root["lead"].is_string()) throw SchemaError("$.lead", "expected string");
    doc.source.lead = root["lead"].get<std::string>();
  }
  doc.source.body = root.contains("body") && root["body"].is_string()
                        ? root["body"].get<std::string>()
                        : std::string();
  if (root.contains("publish_date") && !root["publish_date"].is_null()) {
    const json &pd = root["publish_date"];
    if (!pd.is_string()) throw SchemaError("$.publish_date", "expected string");
    auto parsed = parse_datetime(pd.get<std::string>());
    if (!parsed)
      throw SchemaError("$.publish_date", "not an RFC 3339 date-time");
    doc.source.publish_date = *parsed;
  }

  const json &sentences = array_field(root, "sentences", top);
  for (size_t si = 0; si < sentences.size(); ++si) {
    std::string spath = "$.sentences[" + std::to_string(si) + "]";
    const json &sj = sentences[si];
    Sentence sentence;
    const json &tokens = array_field(sj, "tokens", spath);
    for (size_t ti = 0; ti < tokens.size(); ++ti) {
      std::string tpath = spath + ".tokens[" + std::to_string(ti) + "]";
      const json &tj = tokens[ti];
      Token t;
      t.index_in_sentence = static_cast<int>(ti);
      t.text = string_field(tj, "text", tpath);
      t.lemma = tj.contains("lemma") ? string_field(tj, "lemma", tpath) : t.text;
      t.pos = string_field(tj, "pos", tpath);
      t.ner = tj.contains("ner") ? string_field(tj, "ner", tpath) : "O";
      if (t.ner.empty()) t.ner = "O";
      t.char_begin = int_field(tj, "char_begin", tpath);
      t.char_end = int_field(tj, "char_end", tpath);
      sentence.tokens.push_back(std::move(t));
    }
    sentence.parse = node_from_json(field(sj, "parse", spath), spath + ".parse");
    if (sj.contains("section")) {
      auto sec = section_from_name(string_field(sj, "section", spath));
      if (!sec) throw SchemaError(spath + ".section", "unknown section name");
      sentence.section = *sec;
    }
    doc.sentences.push_back(std::move(sentence));
  }

  if (root.contains("coref") && !root["coref"].is_null()) {
    const json &chains = array_field(root, "coref", top);
    for (size_t ci = 0; ci < chains.size(); ++ci) {
      std::string cpath = "$.coref[" + std::to_string(ci) + "]";
      CorefChain chain;
      const json &mentions = array_field(chains[ci], "mentions", cpath);
      for (size_t mi = 0; mi < mentions.size(); ++mi)
        chain.mentions.push_back(span_from_json(
            mentions[mi], cpath + ".mentions[" + std::to_string(mi) + "]"));
      chain.representative = int_field(chains[ci], "representative", cpath);
      doc.coref.push_back(std::move(chain));
    }
  } else {
    doc.has_coref_layer = false;
  }

  validate_document(doc);
  return doc;
}

void validate_document(AnnotatedDocument &doc) {
  if (doc.source.title.empty() && doc.source.body.empty())
    throw SchemaError("$", "title or body must be non-empty");
  if (doc.sentences.empty())
    throw SchemaError("$.sentences", "document has no sentences");

  std::optional<Section> last_section;
  for (size_t si = 0; si < doc.sentences.size(); ++si) {
    std::string spath = "$.sentences[" + std::to_string(si) + "]";
    Sentence &s = doc.sentences[si];
    if (s.tokens.empty()) throw SchemaError(spath + ".tokens", "empty sentence");
    if (s.section) {
      if (last_section && *s.section < *last_section)
        throw SchemaError(spath + ".section",
                          "sections must appear in title, lead, body order");
      last_section = s.section;
    }
    std::string_view raw =
        s.section ? doc.section_text(*s.section) : std::string_view();
    for (size_t ti = 0; ti < s.tokens.size(); ++ti) {
      std::string tpath = spath + ".tokens[" + std::to_string(ti) + "]";
      Token &t = s.tokens[ti];
      t.index_in_sentence = static_cast<int>(ti);
      if (t.pos.empty()) throw SchemaError(tpath + ".pos", "empty POS tag");
      if (t.char_begin < 0 || t.char_end <= t.char_begin)
        throw SchemaError(tpath + ".char_end", "char_end must exceed char_begin");
      if (s.section && static_cast<size_t>(t.char_end) > raw.size())
        throw SchemaError(tpath + ".char_end", "offset beyond section text");
    }
    int leaves = assign_spans(s.parse, spath + ".parse");
    if (leaves != static_cast<int>(s.tokens.size()))
      throw SchemaError(spath + ".parse",
                        "tree has " + std::to_string(leaves) +
                            " leaves but sentence has " +
                            std::to_string(s.tokens.size()) + " tokens");
  }

  for (size_t ci = 0; ci < doc.coref.size(); ++ci) {
    std::string cpath = "$.coref[" + std::to_string(ci) + "]";
    const CorefChain &chain = doc.coref[ci];
    if (chain.mentions.empty())
      throw SchemaError(cpath + ".mentions", "chain without mentions");
    if (chain.representative < 0 ||
        chain.representative >= static_cast<int>(chain.mentions.size()))
      throw SchemaError(cpath + ".representative", "index out of range");
    for (size_t mi = 0; mi < chain.mentions.size(); ++mi) {
      const PhraseSpan &m = chain.mentions[mi];
      std::string mpath = cpath + ".mentions[" + std::to_string(mi) + "]";
      if (m.sentence < 0 || m.sentence >= doc.d_len())
        throw SchemaError(mpath + ".sentence", "no such sentence");
      int len = static_cast<int>(doc.sentences[m.sentence].tokens.size());
      if (m.begin < 0 || m.end <= m.begin || m.end > len)
        throw SchemaError(mpath, "bad token range");
    }
  }
}

std::string serialize_annotated(const AnnotatedDocument &doc) {
  json root;
  root["version"] = kInterchangeVersion;
  root["title"] = doc.source.title;
  if (doc.source.lead) root["lead"] = *doc.source.lead;
  root["body"] = doc.source.body;
  if (doc.source.publish_date)
    root["publish_date"] = format_datetime(*doc.source.publish_date);
  json sentences = json::array();
  for (const auto &s : doc.sentences) {
    json sj;
    json tokens = json::array();
    for (const auto &t : s.tokens) {
      tokens.push_back({{"text", t.text},
                        {"lemma", t.lemma},
                        {"pos", t.pos},
                        {"ner", t.ner},
                        {"char_begin", t.char_begin},
                        {"char_end", t.char_end}});
    }
    sj["tokens"] = std::move(tokens);
    sj["parse"] = node_to_json(s.parse);
    if (s.section) sj["section"] = section_name(*s.section);
    sentences.push_back(std::move(sj));
  }
  root["sentences"] = std::move(sentences);
  if (doc.has_coref_layer) {
    json chains = json::array();
    for (const auto &c : doc.coref) {
      json mentions = json::array();
      for (const auto &m : c.mentions)
        mentions.push_back(
            {{"sentence", m.sentence}, {"begin", m.begin}, {"end", m.end}});
      chains.push_back(
          {{"mentions", std::move(mentions)}, {"representative", c.representative}});
    }
    root["coref"] = std::move(chains);
  }
  return root.dump(2);
}

std::string span_text(const AnnotatedDocument &doc, const PhraseSpan &span) {
  if (span.sentence < 0 || span.sentence >= doc.d_len())
    throw RangeError("span sentence " + std::to_string(span.sentence) +
                     " outside document of " + std::to_string(doc.d_len()) +
                     " sentences");
  const Sentence &s = doc.sentences[span.sentence];
  if (span.begin < 0 || span.end <= span.begin ||
      span.end > static_cast<int>(s.tokens.size()))
    throw RangeError("token range [" + std::to_string(span.begin) + ", " +
                     std::to_string(span.end) + ") outside sentence of " +
                     std::to_string(s.tokens.size()) + " tokens");
  const Token &first = s.tokens[span.begin];
  const Token &last = s.tokens[span.end - 1];
  if (s.section) {
    std::string_view raw = doc.section_text(*s.section);
    if (static_cast<size_t>(last.char_end) <= raw.size() &&
        first.char_begin < last.char_end) {
      return std::string(
          raw.substr(first.char_begin, last.char_end - first.char_begin));
    }
  }
  std::string out = first.text;
  for (int i = span.begin + 1; i < span.end; ++i) {
    if (s.tokens[i].char_begin > s.tokens[i - 1].char_end) out += ' ';
    out += s.tokens[i].text;
  }
  return out;
}

std::vector<std::string> span_lemmas(const AnnotatedDocument &doc,
                                     const PhraseSpan &span) {
  std::vector<std::string> out;
  const Sentence &s = doc.sentences.at(span.sentence);
  for (int i = span.begin; i < span.end; ++i) {
    const Token &t = s.tokens.at(i);
    out.push_back(to_lower(t.lemma.empty() ? t.text : t.lemma));
  }
  return out;
}

}  // namespace medex
