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

#include "medex/service.h"

#include <sstream>

#include "httplib.h"
#include "medex/errors.h"
#include "medex/textutil.h"
#include "medex/timeutil.h"

namespace medex {

using nlohmann::json;

ArticleInput article_from_json(const json &j) {
  if (!j.is_object()) throw SchemaError("$", "expected an object");
  auto text = [&](const char *key, bool required) -> std::optional<std::string> {
    if (!j.contains(key) || j[key].is_null()) {
      if (required) throw SchemaError(std::string("$.") + key, "missing");
      return std::nullopt;
    }
    if (!j[key].is_string()) throw SchemaError(std::string("$.") + key, "expected a string");
    return j[key].get<std::string>();
  };
  ArticleInput a;
  a.title = text("title", false).value_or("");
  a.lead = text("lead", false);
  a.body = text("body", false).value_or("");
  auto date = text("date", false);
  if (!date) date = text("publish_date", false);
  if (date) {
    a.publish_date = parse_datetime(*date);
    if (!a.publish_date) throw SchemaError("$.date", "not an ISO 8601 date: " + *date);
  }
  return a;
}

nlohmann::ordered_json config_to_json(const ScoringConfig &cfg) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  std::istringstream in(cfg.to_text());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (value == "none")
      out[key] = nullptr;
    else
      out[key] = std::stod(value);
  }
  return out;
}

nlohmann::ordered_json learn_report_to_json(const LearnReport &report) {
  using oj = nlohmann::ordered_json;
  oj j = {{"train", report.train},
          {"test", report.test},
          {"skipped", report.skipped},
          {"warnings", report.warnings}};
  j["questions"] = oj::object();
  for (const auto &[name, r] : report.searches) {
    const auto &best = r.best();
    j["questions"][name] = {{"grid_points", r.ranking.size()},
                            {"weights", best.weights},
                            {"train_me", best.train_me},
                            {"test_me", best.test_me ? oj(*best.test_me) : oj(nullptr)},
                            {"p_value", best.p_value ? oj(*best.p_value) : oj(nullptr)},
                            {"fallback", r.fallback}};
  }
  return j;
}

nlohmann::ordered_json magp_report_to_json(const MagpReport &report) {
  using oj = nlohmann::ordered_json;
  return {{"groups", report.groups}, {"overall", report.overall ? oj(*report.overall) : oj(nullptr)}};
}

Reply error_reply(int status, std::string_view type, std::string_view message) {
  json body = {{"error",
                {{"status", status}, {"type", std::string(type)}, {"message", std::string(message)}}}};
  return {status, body.dump(2) + "\n", "application/json"};
}

ExtractionService::ExtractionService(ServiceOptions options)
    : options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  options_.pipeline.config.validate();
  mount();
}

ExtractionService::~ExtractionService() = default;

Reply ExtractionService::extract(const std::string &request_body) const {
  json req;
  try {
    req = json::parse(request_body);
  } catch (const json::parse_error &e) {
    if (trim(request_body).empty()) return error_reply(422, "EmptyArticle", "request body is empty");
    return error_reply(400, "SchemaError", std::string("malformed JSON: ") + e.what());
  }
  try {
    AnnotatedDocument doc;
    if (req.is_object() && req.contains("annotated")) {
      doc = load_annotated(req["annotated"].dump());
      if (doc.d_len() == 0) return error_reply(422, "EmptyArticle", "document has no sentences");
    } else {
      ArticleInput article = article_from_json(req);
      if (article.empty()) return error_reply(422, "EmptyArticle", "article has no text");
      if (!options_.nlp)
        return error_reply(502, "NetworkError", "no annotation server configured for raw articles");
      doc = annotate_remote(article, *options_.nlp);
    }
    ExtractionResult result = run_pipeline(doc, options_.pipeline);
    return {200, serialize_result(result), "application/json"};
  } catch (const SchemaError &e) {
    return error_reply(400, "SchemaError", e.what());
  } catch (const DegenerateDocument &e) {
    return error_reply(422, "EmptyArticle", e.what());
  } catch (const NetworkError &e) {
    return error_reply(502, "NetworkError", e.what());
  } catch (const ProtocolError &e) {
    return error_reply(502, "ProtocolError", e.what());
  } catch (const Error &e) {
    return error_reply(500, "InternalError", e.what());
  }
}

Reply ExtractionService::health() const { return {200, "ok", "text/plain"}; }

Reply ExtractionService::config() const {
  return {200, config_to_json(options_.pipeline.config).dump(2) + "\n", "application/json"};
}

void ExtractionService::mount() {
  auto send = [](httplib::Response &res, const Reply &r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  for (std::string prefix : {"/v1", ""}) {
    server_->Post(prefix + "/extract", [this, send](const httplib::Request &req,
                                                    httplib::Response &res) {
      send(res, extract(req.body));
    });
    server_->Get(prefix + "/health",
                 [this, send](const httplib::Request &, httplib::Response &res) {
                   send(res, health());
                 });
    server_->Get(prefix + "/config",
                 [this, send](const httplib::Request &, httplib::Response &res) {
                   send(res, config());
                 });
  }
}

bool ExtractionService::listen(const std::string &host, int port) {
  return server_->listen(host, port);
}

int ExtractionService::bind_any_port(const std::string &host) {
  return server_->bind_to_any_port(host);
}

bool ExtractionService::listen_after_bind() { return server_->listen_after_bind(); }

void ExtractionService::stop() { server_->stop(); }

void ExtractionService::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace medex
