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

#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "httplib.h"
#include "medex/canonicalize.h"
#include "medex/errors.h"
#include "medex/geocoder.h"
#include "test_support.h"

using namespace medex;
using medex::testing::body_doc;
using medex::testing::dt;

namespace {

std::vector<std::string> words(const char *s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

TimePoint tp(const char *text) { return dt(text).utc; }

class FailingLinker : public EntityLinker {
 public:
  std::vector<LinkedEntity> link(const AnnotatedDocument &) override {
    throw NetworkError("linker offline");
  }
};

class StubLinker : public EntityLinker {
 public:
  std::vector<LinkedEntity> link(const AnnotatedDocument &) override {
    return {{{0, 0, 1}, "Q64", 0.9}};
  }
};

}  // namespace

TEST_CASE("late Thursday resolves to the whole day") {
  auto r = resolve_temporal_phrase(words("late Thursday"), dt("2016-11-11T09:00:00Z"));
  REQUIRE(r.outcome == TemporalOutcome::kResolved);
  REQUIRE(r.instance.has_value());
  CHECK(r.instance->kind == TimexKind::kDuration);
  CHECK(r.instance->start == tp("2016-11-10T00:00:00Z"));
  CHECK(r.instance->end == tp("2016-11-10T23:59:59Z"));
}

TEST_CASE("yesterday at 1 pm is an exact time") {
  auto r = resolve_temporal_phrase(words("yesterday at 1 pm"), dt("2016-11-11T09:00:00Z"));
  REQUIRE(r.instance.has_value());
  CHECK(r.instance->kind == TimexKind::kExactTime);
  CHECK(r.instance->start == tp("2016-11-10T13:00:00Z"));
  CHECK(r.instance->duration_seconds() == 0.0);
}

TEST_CASE("repetitive and unanchored expressions are dropped") {
  auto every = resolve_temporal_phrase(words("every Monday"), dt("2016-11-11T09:00:00Z"));
  CHECK(every.outcome == TemporalOutcome::kRepetitive);
  CHECK_FALSE(every.instance.has_value());

  auto rel = resolve_temporal_phrase(words("yesterday"), std::nullopt);
  CHECK(rel.outcome == TemporalOutcome::kMissingPubDate);

  auto doc = body_doc({"(ROOT (S (NP (PRP It)) (VP (VBD happened) (NP (NN yesterday|DATE)))))"});
  auto norm = normalize_temporal(doc, std::nullopt);
  CHECK(norm.instances.empty());
  REQUIRE(norm.missing_pub_date.size() == 1);
  CHECK(norm.missing_pub_date[0] == PhraseSpan{0, 2, 3});

  auto anchored = normalize_temporal(doc, dt("2016-11-11T09:00:00Z"));
  REQUIRE(anchored.instances.size() == 1);
  CHECK(anchored.instances[0].start == tp("2016-11-10T00:00:00Z"));
  CHECK(anchored.instances[0].span == PhraseSpan{0, 2, 3});
}

TEST_CASE("absolute dates need no anchor") {
  auto r = resolve_temporal_phrase(words("November 10 , 2016"), std::nullopt);
  REQUIRE(r.instance.has_value());
  CHECK(r.instance->start == tp("2016-11-10T00:00:00Z"));
}

TEST_CASE("location tokens merge within a shared phrase") {
  SUBCASE("single city") {
    auto doc = body_doc({"(ROOT (S (NP (PRP We)) (VP (VBD flew) (PP (TO to) (NP (NNP Berlin|CITY))))))"});
    auto spans = merge_location_tokens(doc);
    REQUIRE(spans.size() == 1);
    CHECK(span_text(doc, spans[0]) == "Berlin");
  }
  SUBCASE("city and country separated by a comma") {
    auto doc = body_doc(
        {"(ROOT (S (NP (PRP It)) (VP (VBD hit) (NP (NNP Mazar-i-Sharif|CITY) (, ,) (NNP "
         "Afghanistan|COUNTRY)))))"});
    auto spans = merge_location_tokens(doc);
    REQUIRE(spans.size() == 1);
    CHECK(span_text(doc, spans[0]) == "Mazar-i-Sharif , Afghanistan");
  }
  SUBCASE("too far apart to merge") {
    auto doc = body_doc(
        {"(ROOT (S (NP (PRP We)) (VP (VBD visited) (NP (NNP Paris|CITY) (CC and) (RB then) (NNP "
         "Rome|CITY)))))"});
    auto spans = merge_location_tokens(doc);
    REQUIRE(spans.size() == 2);
    CHECK(span_text(doc, spans[0]) == "Paris");
    CHECK(span_text(doc, spans[1]) == "Rome");
    CHECK(merge_location_tokens(doc, 2).size() == 1);
  }
  CHECK(is_location_tag("CITY"));
  CHECK(is_location_tag("LOCATION"));
  CHECK_FALSE(is_location_tag("PERSON"));
}

TEST_CASE("bounding box area") {
  CHECK(bbox_area({10, 20, 10, 20}) == kMinAreaM2);
  // R^2 * dlon * (sin(north) - sin(south)), computed independently.
  CHECK(bbox_area({0, 0, 1, 1}) == doctest::Approx(12363683990.261118).epsilon(1e-9));
  CHECK(bbox_area({40, 5, 50, 15}) == doctest::Approx(873179606305.4113).epsilon(1e-9));
  // Mirror images have equal area.
  CHECK(bbox_area({-50, -15, -40, -5}) == doctest::Approx(bbox_area({40, 5, 50, 15})));
  // Antimeridian wrap: 179E..179W is a 2 degree box.
  CHECK(bbox_area({0, 179, 1, -179}) == doctest::Approx(2 * bbox_area({0, 0, 1, 1})));

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-60, 60), grow(0, 5);
  for (int i = 0; i < 500; ++i) {
    double s = u(rng), w = u(rng);
    BoundingBox inner{s, w, s + grow(rng), w + grow(rng)};
    BoundingBox outer{inner.south - grow(rng), inner.west - grow(rng), inner.north + grow(rng),
                      inner.east + grow(rng)};
    CHECK(bbox_area(outer) >= bbox_area(inner));
    CHECK(bbox_area(inner) >= kMinAreaM2);
  }
  CHECK(BoundingBox{0, 0, 1, 1}.contains(0.5, 0.5));
  CHECK_FALSE(BoundingBox{0, 0, 1, 1}.contains(1.5, 0.5));
}

TEST_CASE("geocoding through a fixture client") {
  FixtureGeocoder geo;
  GeocoderHit berlin{52.52, 13.405, {52.3, 13.0, 52.7, 13.8}, "240109189", "Berlin, Germany"};
  geo.add("Berlin", berlin);
  auto g = geocode("berlin", geo);
  REQUIRE(g.has_value());
  CHECK(g->place_id == "240109189");
  CHECK(g->area_m2 == doctest::Approx(bbox_area(berlin.bbox)));
  CHECK_FALSE(geocode("Atlantis", geo).has_value());
  CHECK(geo.calls() == 2);
  CHECK(normalize_query("  Mazar-i-Sharif ,\tAfghanistan ") == "mazar-i-sharif , afghanistan");
}

TEST_CASE("nominatim responses parse") {
  auto hit = parse_nominatim_response(
      R"([{"place_id": 1, "lat": "1.5", "lon": "2.5", "display_name": "X",
           "boundingbox": ["1", "2", "2", "3"]}])");
  REQUIRE(hit.has_value());
  CHECK(hit->lat == 1.5);
  CHECK(hit->bbox == BoundingBox{1, 2, 2, 3});
  CHECK(hit->place_id == "1");
  CHECK_FALSE(parse_nominatim_response("[]").has_value());
  CHECK_THROWS_AS(parse_nominatim_response("{\"error\": 1}"), ProtocolError);
}

TEST_CASE("cache hits avoid the network") {
  int served = 0;
  httplib::Server server;
  server.Get("/search", [&](const httplib::Request &req, httplib::Response &res) {
    ++served;
    CHECK(req.get_param_value("format") == "json");
    res.set_content(
        R"([{"place_id": 9, "lat": "48.85", "lon": "2.35", "display_name": "Paris",
             "boundingbox": ["48.8", "48.9", "2.2", "2.5"]}])",
        "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  auto path = std::filesystem::temp_directory_path() / "medex_geocache_test.jsonl";
  std::filesystem::remove(path);
  NominatimOptions opts;
  opts.url = "http://127.0.0.1:" + std::to_string(port);
  opts.min_interval = std::chrono::milliseconds(0);
  {
    GeocodeCache cache(path.string());
    NominatimClient client(opts, &cache);
    CHECK(client.lookup("Paris").has_value());
    CHECK(client.lookup("  paris ").has_value());
    CHECK(client.network_calls() == 1);
  }
  {
    // A fresh process reads the persisted record and never calls out.
    GeocodeCache cache(path.string());
    CHECK(cache.size() == 1);
    NominatimClient client(opts, &cache);
    CHECK(client.lookup("PARIS")->place_id == "9");
    CHECK(client.network_calls() == 0);
  }
  CHECK(served == 1);
  server.stop();
  t.join();

  // Offline mode serves only what is cached.
  GeocodeCache cache(path.string());
  NominatimClient offline({}, &cache);
  CHECK(offline.lookup("paris").has_value());
  CHECK_FALSE(offline.lookup("rome").has_value());
  std::filesystem::remove(path);

  // The recorded responses used elsewhere resolve the same place.
  auto fig1 = medex::testing::fig1_cache();
  NominatimClient fixture({}, &fig1);
  auto a = geocode("Mazar-i-Sharif", fixture);
  auto b = geocode("Afghanistan 's Mazar-i-Sharif", fixture);
  REQUIRE(a.has_value());
  CHECK(a->place_id == "235302914");
  if (b) CHECK(b->place_id == a->place_id);
}

TEST_CASE("unreachable geocoder is a network error") {
  int port = medex::testing::unused_port();
  NominatimOptions opts;
  opts.url = "http://127.0.0.1:" + std::to_string(port);
  opts.timeout = std::chrono::seconds(1);
  NominatimClient client(opts, nullptr);
  CHECK_THROWS_AS(client.lookup("Paris"), NetworkError);
}

TEST_CASE("entity linkers") {
  auto doc = body_doc({"(ROOT (S (NP (NNP Berlin|CITY)) (VP (VBD grew))))"});
  CHECK(link_entities(doc).empty());
  NullEntityLinker null;
  CHECK(link_entities(doc, &null).empty());
  StubLinker stub;
  auto linked = link_entities(doc, &stub);
  REQUIRE(linked.size() == 1);
  CHECK(linked[0].concept_id == "Q64");
  FailingLinker failing;
  CHECK_THROWS_AS(link_entities(doc, &failing), NetworkError);
}
