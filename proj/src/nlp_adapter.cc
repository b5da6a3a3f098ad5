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

#include "medex/nlp_adapter.h"

#include <algorithm>
#include <map>

#include "httplib.h"
#include "json.hpp"
#include "medex/errors.h"
#include "medex/httputil.h"
#include "medex/textutil.h"

namespace medex {

using nlohmann::json;

void AnnotationServerConfig::validate() const {
  if (endpoint.empty()) throw ConfigError("annotation server endpoint is empty");
  if (timeout.count() <= 0) throw ConfigError("annotation server timeout must be > 0");
}

JoinedArticle join_sections(const ArticleInput &article) {
  JoinedArticle out;
  out.sections = concat_sections(article);
  for (const auto &s : out.sections) {
    if (!out.text.empty()) out.text += "\n\n";
    out.starts.push_back(out.text.size());
    out.text += s.text;
  }
  return out;
}

std::string annotation_properties(const AnnotationServerConfig &cfg) {
  std::string annotators;
  for (const auto &a : cfg.annotators) {
    if (!annotators.empty()) annotators += ',';
    annotators += a;
  }
  json props = {{"annotators", annotators},
                {"outputFormat", "json"},
                {"ssplit.newlineIsSentenceBreak", "two"}};
  return props.dump();
}

namespace {

// Byte offset of every UTF-16 code unit position in `text` (plus the end).
std::vector<int> utf16_to_byte(const std::string &text) {
  std::vector<int> map;
  map.reserve(text.size() + 1);
  size_t i = 0;
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : 4;
    len = std::min(len, text.size() - i);
    map.push_back(static_cast<int>(i));
    if (len == 4) map.push_back(static_cast<int>(i));  // surrogate pair
    i += len;
  }
  map.push_back(static_cast<int>(text.size()));
  return map;
}

bool wants(const std::vector<std::string> &annotators, std::string_view layer) {
  return std::find(annotators.begin(), annotators.end(), layer) != annotators.end();
}

[[noreturn]] void missing_layer(const std::string &layer) {
  throw ProtocolError("annotation server response lacks layer: " + layer);
}

}  // namespace

AnnotatedDocument map_server_response(const ArticleInput &article,
                                      std::string_view response_body,
                                      const std::vector<std::string> &annotators) {
  json root;
  try {
    root = json::parse(response_body);
  } catch (const json::parse_error &e) {
    throw ProtocolError(std::string("annotation response is not JSON: ") + e.what());
  }
  if (!root.is_object() || !root.contains("sentences") || !root["sentences"].is_array())
    missing_layer("ssplit");

  JoinedArticle joined = join_sections(article);
  std::vector<int> offsets = utf16_to_byte(joined.text);
  auto to_byte = [&](int u16) {
    if (u16 < 0 || static_cast<size_t>(u16) >= offsets.size())
      throw ProtocolError("character offset " + std::to_string(u16) + " out of range");
    return offsets[u16];
  };

  AnnotatedDocument doc;
  doc.source = article;
  for (const json &sj : root["sentences"]) {
    if (!sj.contains("tokens") || !sj["tokens"].is_array()) missing_layer("tokenize");
    if (!sj.contains("parse") || !sj["parse"].is_string()) missing_layer("parse");
    Sentence sentence;
    for (const json &tj : sj["tokens"]) {
      Token t;
      t.index_in_sentence = static_cast<int>(sentence.tokens.size());
      if (tj.contains("originalText") && tj["originalText"].is_string())
        t.text = tj["originalText"].get<std::string>();
      else if (tj.contains("word") && tj["word"].is_string())
        t.text = tj["word"].get<std::string>();
      else
        missing_layer("tokenize");
      if (!tj.contains("pos")) missing_layer("pos");
      t.pos = tj["pos"].get<std::string>();
      if (!tj.contains("lemma")) {
        if (wants(annotators, "lemma")) missing_layer("lemma");
        t.lemma = t.text;
      } else {
        t.lemma = tj["lemma"].get<std::string>();
      }
      if (!tj.contains("ner")) {
        if (wants(annotators, "ner")) missing_layer("ner");
      } else {
        t.ner = tj["ner"].get<std::string>();
      }
      if (!tj.contains("characterOffsetBegin") || !tj.contains("characterOffsetEnd"))
        missing_layer("tokenize");
      t.char_begin = to_byte(tj["characterOffsetBegin"].get<int>());
      t.char_end = to_byte(tj["characterOffsetEnd"].get<int>());
      sentence.tokens.push_back(std::move(t));
    }
    if (sentence.tokens.empty()) continue;

    std::vector<std::string> words;
    try {
      sentence.parse = parse_bracketed(sj["parse"].get<std::string>(), &words);
    } catch (const SchemaError &e) {
      throw ProtocolError(std::string("unreadable parse: ") + e.what());
    }
    if (words.size() != sentence.tokens.size())
      throw ProtocolError("parse has " + std::to_string(words.size()) +
                          " leaves for " + std::to_string(sentence.tokens.size()) +
                          " tokens");

    // Rebase offsets onto the section containing the first token.
    int first = sentence.tokens.front().char_begin;
    size_t sec = 0;
    for (size_t k = 0; k < joined.starts.size(); ++k)
      if (static_cast<size_t>(first) >= joined.starts[k]) sec = k;
    if (!joined.sections.empty()) {
      sentence.section = joined.sections[sec].kind;
      int base = static_cast<int>(joined.starts[sec]);
      for (auto &t : sentence.tokens) {
        t.char_begin -= base;
        t.char_end -= base;
      }
    }
    doc.sentences.push_back(std::move(sentence));
  }

  if (root.contains("corefs") && root["corefs"].is_object()) {
    for (const auto &[id, mentions] : root["corefs"].items()) {
      CorefChain chain;
      for (const json &m : mentions) {
        PhraseSpan span{m.at("sentNum").get<int>() - 1, m.at("startIndex").get<int>() - 1,
                        m.at("endIndex").get<int>() - 1};
        if (m.value("isRepresentativeMention", false))
          chain.representative = static_cast<int>(chain.mentions.size());
        chain.mentions.push_back(span);
      }
      if (!chain.mentions.empty()) doc.coref.push_back(std::move(chain));
    }
  } else {
    if (wants(annotators, "coref") && root.contains("corefs"))
      missing_layer("coref");
    doc.has_coref_layer = false;
  }

  try {
    validate_document(doc);
  } catch (const SchemaError &e) {
    throw ProtocolError(std::string("server response violates document model: ") +
                        e.what());
  }
  return doc;
}

AnnotatedDocument annotate_remote(const ArticleInput &article,
                                  const AnnotationServerConfig &cfg) {
  cfg.validate();
  if (article.empty()) throw SchemaError("$", "article is empty");
  JoinedArticle joined = join_sections(article);
  HttpEndpoint ep = split_url(cfg.endpoint);
  std::string path = ep.path_prefix + "/?properties=" +
                     httplib::detail::encode_query_param(annotation_properties(cfg));

  httplib::Result res;
  for (int attempt = 0; attempt < 2; ++attempt) {
    httplib::Client client(ep.origin);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    res = client.Post(path, joined.text, "text/plain; charset=utf-8");
    if (res) break;
  }
  if (!res)
    throw NetworkError("annotation server " + cfg.endpoint + ": " +
                       httplib::to_string(res.error()));
  if (res->status != 200)
    throw NetworkError("annotation server " + cfg.endpoint + ": HTTP " +
                       std::to_string(res->status));
  return map_server_response(article, res->body, cfg.annotators);
}

AnnotatedDocument annotate_offline(const std::string &path) {
  return load_annotated(read_file(path));
}

}  // namespace medex
