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

// Sources of annotated documents: a CoreNLP-compatible annotation server, or
// med-1 files on disk.
//
// Wire mapping (server JSON -> document model):
//   sentences[i]                      -> one Sentence, in order
//   tokens[j].originalText | word     -> Token.text
//   tokens[j].lemma / pos / ner       -> Token.lemma / pos / ner
//   tokens[j].characterOffsetBegin/End (UTF-16 units into the joined text)
//                                     -> byte offsets into the section text
//   parse (bracketed string)          -> ParseNode, leaves numbered in order
//   corefs{id: [mention...]}          -> CorefChain; sentNum and startIndex
//                                        are 1-based, endIndex exclusive
// The article's sections are sent as one text joined by blank lines so that
// coreference spans the whole article; each sentence is then assigned to the
// section its first token falls in.

#ifndef MEDEX_NLP_ADAPTER_H_
#define MEDEX_NLP_ADAPTER_H_

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

#include "medex/docmodel.h"

namespace medex {

struct AnnotationServerConfig {
  std::string endpoint;
  std::chrono::milliseconds timeout{30000};
  std::vector<std::string> annotators = {"tokenize", "ssplit", "pos", "lemma",
                                         "ner",      "parse",  "coref"};

  // Throws ConfigError.
  void validate() const;
};

// Section texts joined the way they are sent to the server.
struct JoinedArticle {
  std::string text;
  std::vector<ArticleSection> sections;
  std::vector<size_t> starts;  // byte offset of each section in `text`
};

JoinedArticle join_sections(const ArticleInput &article);

// The "properties" query value sent with each request.
std::string annotation_properties(const AnnotationServerConfig &cfg);

// Maps a server response for `article` into a validated document. Throws
// ProtocolError naming the missing layer ("pos", "parse", ...).
AnnotatedDocument map_server_response(const ArticleInput &article,
                                      std::string_view response_body,
                                      const std::vector<std::string> &annotators =
                                          AnnotationServerConfig{}.annotators);

// POSTs the article and maps the reply. Retries once on a transport failure.
// Throws NetworkError, ProtocolError.
AnnotatedDocument annotate_remote(const ArticleInput &article,
                                  const AnnotationServerConfig &cfg);

// Throws IoError, SchemaError.
AnnotatedDocument annotate_offline(const std::string &path);

}  // namespace medex

#endif  // MEDEX_NLP_ADAPTER_H_
