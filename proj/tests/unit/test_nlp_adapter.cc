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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "medex/errors.h"
#include "medex/nlp_adapter.h"
#include "medex/service.h"
#include "test_support.h"

using namespace medex;
using nlohmann::json;
using medex::testing::data_path;

namespace {

struct Recorded {
  ArticleInput article;
  json response;
};

Recorded recorded() {
  std::ifstream in(data_path("fixtures/corenlp_response.json"));
  json j = json::parse(in);
  return {article_from_json(j["article"]), j["response"]};
}

// An annotation server on an ephemeral port that answers with `handler`.
class FakeServer {
 public:
  explicit FakeServer(httplib::Server::Handler handler) {
    server_.Post("/", handler);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int hits = 0;

 private:
  httplib::Server server_;
  int port_ = -1;
  std::thread thread_;
};

}  // namespace

TEST_CASE("recorded response maps onto the document model") {
  auto rec = recorded();
  auto doc = map_server_response(rec.article, rec.response.dump());
  REQUIRE(doc.d_len() == 3);
  CHECK(doc.sentences[0].section == Section::kTitle);
  CHECK(doc.sentences[1].section == Section::kBody);
  CHECK(doc.sentences[2].section == Section::kBody);
  CHECK(doc.token(0, 2).ner == "CITY");
  CHECK(doc.token(1, 0).lemma == "flight");
  // Offsets are rebased to the section and converted to bytes.
  CHECK(span_text(doc, {1, 2, 3}) == "Zürich");
  CHECK(span_text(doc, {1, 3, 7}) == "were cancelled on Monday");
  CHECK(doc.token(1, 3).char_begin == 19);
  REQUIRE(doc.coref.size() == 1);
  CHECK(doc.coref[0].mentions[0] == PhraseSpan{1, 0, 3});
  CHECK(doc.coref[0].mentions[1] == PhraseSpan{2, 0, 1});
  CHECK(doc.coref[0].representative == 0);
  CHECK(tree_path(doc.sentences[2], 2) == "S/VP/NP-TMP/NN");
}

TEST_CASE("missing layers are protocol errors naming the layer") {
  auto rec = recorded();
  json no_parse = rec.response;
  no_parse["sentences"][1].erase("parse");
  try {
    map_server_response(rec.article, no_parse.dump());
    FAIL("expected ProtocolError");
  } catch (const ProtocolError &e) {
    CHECK(std::string(e.what()).find("parse") != std::string::npos);
  }

  json no_pos = rec.response;
  no_pos["sentences"][0]["tokens"][1].erase("pos");
  CHECK_THROWS_WITH_AS(map_server_response(rec.article, no_pos.dump()),
                       doctest::Contains("pos"), ProtocolError);

  json no_ner = rec.response;
  no_ner["sentences"][0]["tokens"][0].erase("ner");
  CHECK_THROWS_AS(map_server_response(rec.article, no_ner.dump()), ProtocolError);
  // Not requested, so not required.
  CHECK_NOTHROW(map_server_response(rec.article, no_ner.dump(),
                                    {"tokenize", "ssplit", "pos", "lemma", "parse"}));

  json short_parse = rec.response;
  short_parse["sentences"][0]["parse"] = "(ROOT (S (NP (NN Storm)) (VP (VBZ hits))))";
  CHECK_THROWS_AS(map_server_response(rec.article, short_parse.dump()), ProtocolError);

  CHECK_THROWS_AS(map_server_response(rec.article, "<html>"), ProtocolError);
  CHECK_THROWS_AS(map_server_response(rec.article, "{}"), ProtocolError);
}

TEST_CASE("sections are joined with blank lines") {
  ArticleInput a;
  a.title = "T";
  a.lead = "L";
  a.body = "B b";
  auto joined = join_sections(a);
  CHECK(joined.text == "T\n\nL\n\nB b");
  CHECK(joined.starts == std::vector<size_t>{0, 3, 6});
  auto props = json::parse(annotation_properties(AnnotationServerConfig{"http://x"}));
  CHECK(props["outputFormat"] == "json");
  CHECK(props["annotators"].get<std::string>().find("coref") != std::string::npos);
}

TEST_CASE("remote annotation against a replaying server") {
  auto rec = recorded();
  std::string received;
  FakeServer server([&](const httplib::Request &req, httplib::Response &res) {
    received = req.body;
    CHECK(req.has_param("properties"));
    res.set_content(rec.response.dump(), "application/json");
  });
  AnnotationServerConfig cfg{server.url()};
  auto doc = annotate_remote(rec.article, cfg);
  CHECK(received == join_sections(rec.article).text);
  CHECK(doc == map_server_response(rec.article, rec.response.dump()));
}

TEST_CASE("transport failures are network errors") {
  auto rec = recorded();
  SUBCASE("timeout") {
    FakeServer server([&](const httplib::Request &, httplib::Response &res) {
      std::this_thread::sleep_for(std::chrono::milliseconds(600));
      res.set_content("{}", "application/json");
    });
    AnnotationServerConfig cfg{server.url(), std::chrono::milliseconds(100)};
    CHECK_THROWS_AS(annotate_remote(rec.article, cfg), NetworkError);
  }
  SUBCASE("server error status") {
    FakeServer server([&](const httplib::Request &, httplib::Response &res) {
      res.status = 500;
      res.set_content("boom", "text/plain");
    });
    CHECK_THROWS_AS(annotate_remote(rec.article, {server.url()}), NetworkError);
  }
  SUBCASE("unreachable") {
    int port = medex::testing::unused_port();
    AnnotationServerConfig cfg{"http://127.0.0.1:" + std::to_string(port),
                               std::chrono::milliseconds(500)};
    CHECK_THROWS_AS(annotate_remote(rec.article, cfg), NetworkError);
  }
  CHECK_THROWS_AS(AnnotationServerConfig{}.validate(), ConfigError);
  CHECK_THROWS_AS(annotate_remote(ArticleInput{}, {"http://127.0.0.1:1"}), SchemaError);
}

TEST_CASE("offline loading reports io and schema errors") {
  CHECK(annotate_offline(data_path("fixtures/fig1.json")).d_len() == 4);
  CHECK_THROWS_AS(annotate_offline("/nonexistent/doc.json"), IoError);

  std::ifstream in(data_path("fixtures/fig1.json"));
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  auto tmp = std::filesystem::temp_directory_path() / "medex_truncated.json";
  std::ofstream(tmp) << text.substr(0, text.size() / 2);
  CHECK_THROWS_AS(annotate_offline(tmp.string()), SchemaError);
  std::filesystem::remove(tmp);
}
