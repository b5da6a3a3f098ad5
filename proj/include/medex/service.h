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

// HTTP front end. Routes live under /v1 and are mirrored without the prefix:
//
//   POST /v1/extract  {title, lead?, body, date?} or {annotated: <document>}
//   GET  /v1/health   "ok"
//   GET  /v1/config   active scoring configuration as a JSON object

#ifndef MEDEX_SERVICE_H_
#define MEDEX_SERVICE_H_

#include <memory>
#include <optional>
#include <string>

#include "json.hpp"
#include "medex/docmodel.h"
#include "medex/evalkit.h"
#include "medex/learning.h"
#include "medex/nlp_adapter.h"
#include "medex/pipeline.h"

namespace httplib {
class Server;
}

namespace medex {

// Reads {title, lead?, body, date?}. Throws SchemaError with a JSON path.
ArticleInput article_from_json(const nlohmann::json &j);

// Config as {"w_who.position": 0.9, ..., "threshold.why": null}.
nlohmann::ordered_json config_to_json(const ScoringConfig &cfg);

// {"train", "test", "skipped", "warnings", "questions": {name: best config}}.
nlohmann::ordered_json learn_report_to_json(const LearnReport &report);

// {"groups": {...}, "overall": number | null}.
nlohmann::ordered_json magp_report_to_json(const MagpReport &report);

struct ServiceOptions {
  PipelineOptions pipeline;
  // Raw articles need an annotation server; without one they get a 502.
  std::optional<AnnotationServerConfig> nlp;
};

struct Reply {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

class ExtractionService {
 public:
  explicit ExtractionService(ServiceOptions options);
  ~ExtractionService();

  // Request handlers, usable without a socket.
  Reply extract(const std::string &request_body) const;
  Reply health() const;
  Reply config() const;

  // Blocks until stop(). Returns false when the address cannot be bound.
  bool listen(const std::string &host, int port);
  // Binds an ephemeral port and returns it, or -1; serve with listen_after_bind().
  int bind_any_port(const std::string &host);
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  void mount();

  ServiceOptions options_;
  std::unique_ptr<httplib::Server> server_;
};

// JSON error body {"error": {"status", "type", "message"}}.
Reply error_reply(int status, std::string_view type, std::string_view message);

}  // namespace medex

#endif  // MEDEX_SERVICE_H_
