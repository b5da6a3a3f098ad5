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

#include "medex/geocoder.h"

#include <cctype>
#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "medex/errors.h"
#include "medex/httputil.h"
#include "medex/textutil.h"

namespace medex {

using nlohmann::json;

std::string normalize_query(std::string_view query) {
  std::string out;
  bool space = false;
  for (char c : trim(query)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

namespace {

double as_double(const json &v, const char *what) {
  try {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return std::stod(v.get<std::string>());
  } catch (const std::exception &) {
  }
  throw ProtocolError(std::string("geocoder response: bad '") + what + "'");
}

}  // namespace

std::optional<GeocoderHit> parse_nominatim_response(std::string_view body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error &e) {
    throw ProtocolError(std::string("geocoder response is not JSON: ") + e.what());
  }
  if (!j.is_array()) throw ProtocolError("geocoder response is not an array");
  if (j.empty()) return std::nullopt;
  const json &top = j.front();
  if (!top.is_object() || !top.contains("lat") || !top.contains("lon"))
    throw ProtocolError("geocoder response lacks coordinates");
  GeocoderHit hit;
  hit.lat = as_double(top["lat"], "lat");
  hit.lon = as_double(top["lon"], "lon");
  if (top.contains("boundingbox")) {
    const json &bb = top["boundingbox"];
    if (!bb.is_array() || bb.size() != 4)
      throw ProtocolError("geocoder response: bad 'boundingbox'");
    // Nominatim order: south, north, west, east.
    hit.bbox = {as_double(bb[0], "boundingbox"), as_double(bb[2], "boundingbox"),
                as_double(bb[1], "boundingbox"), as_double(bb[3], "boundingbox")};
  } else {
    hit.bbox = {hit.lat, hit.lon, hit.lat, hit.lon};
  }
  if (top.contains("place_id")) {
    const json &pid = top["place_id"];
    hit.place_id = pid.is_string() ? pid.get<std::string>() : pid.dump();
  }
  if (top.contains("display_name") && top["display_name"].is_string())
    hit.display_name = top["display_name"].get<std::string>();
  if (hit.lat < -90 || hit.lat > 90 || hit.lon < -180 || hit.lon > 180 ||
      hit.bbox.south > hit.bbox.north)
    throw ProtocolError("geocoder response: coordinates out of range");
  return hit;
}

std::optional<Geocode> geocode(std::string_view phrase, GeocoderClient &client) {
  if (trim(phrase).empty()) return std::nullopt;
  auto hit = client.lookup(phrase);
  if (!hit) return std::nullopt;
  Geocode g;
  g.lat = hit->lat;
  g.lon = hit->lon;
  g.bbox = hit->bbox;
  g.place_id = hit->place_id;
  g.display_name = hit->display_name;
  g.area_m2 = bbox_area(hit->bbox);
  return g;
}

// --- Cache -------------------------------------------------------------------

GeocodeCache::GeocodeCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      json rec = json::parse(line);
      const json &response = rec.at("response");
      entries_[normalize_query(rec.at("query").get<std::string>())] =
          response.is_string() ? response.get<std::string>() : response.dump();
    } catch (const std::exception &e) {
      throw IoError("geocoder cache " + path_ + ":" + std::to_string(lineno) +
                    ": " + e.what());
    }
  }
}

std::optional<std::string> GeocodeCache::find(std::string_view query) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find(normalize_query(query));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void GeocodeCache::store(std::string_view query, const std::string &response) {
  std::string key = normalize_query(query);
  {
    std::unique_lock lock(mu_);
    if (!entries_.emplace(key, response).second) return;
  }
  if (path_.empty()) return;
  json rec;
  rec["query"] = key;
  try {
    rec["response"] = json::parse(response);
  } catch (const json::parse_error &) {
    rec["response"] = response;
  }
  std::lock_guard lock(file_mu_);
  std::ofstream out(path_, std::ios::app);
  if (!out) throw IoError("cannot append to geocoder cache " + path_);
  out << rec.dump() << '\n';
}

size_t GeocodeCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

// --- Live client -------------------------------------------------------------

namespace {

// One request per interval across all clients in the process.
void wait_for_slot(std::chrono::milliseconds interval) {
  static std::mutex mu;
  static std::chrono::steady_clock::time_point next{};
  std::unique_lock lock(mu);
  auto now = std::chrono::steady_clock::now();
  if (now < next) {
    std::this_thread::sleep_for(next - now);
    now = std::chrono::steady_clock::now();
  }
  next = now + interval;
}

}  // namespace

NominatimClient::NominatimClient(NominatimOptions options, GeocodeCache *cache)
    : options_(std::move(options)), cache_(cache) {}

std::optional<GeocoderHit> NominatimClient::lookup(std::string_view query) {
  std::string key = normalize_query(query);
  if (cache_) {
    if (auto cached = cache_->find(key)) return parse_nominatim_response(*cached);
  }
  if (options_.url.empty()) return std::nullopt;
  std::string body = fetch(key);
  auto hit = parse_nominatim_response(body);
  if (cache_) cache_->store(key, body);
  return hit;
}

std::string NominatimClient::fetch(const std::string &query) {
  HttpEndpoint ep = split_url(options_.url);
  wait_for_slot(options_.min_interval);
  ++network_calls_;
  httplib::Client client(ep.origin);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  httplib::Params params{{"q", query}, {"format", "json"}, {"limit", "1"}};
  httplib::Headers headers{{"User-Agent", options_.user_agent}};
  auto res = client.Get(ep.path_prefix + "/search", params, headers);
  if (!res)
    throw NetworkError("geocoder " + options_.url + ": " +
                       httplib::to_string(res.error()));
  if (res->status != 200)
    throw NetworkError("geocoder " + options_.url + ": HTTP " +
                       std::to_string(res->status));
  return res->body;
}

// --- Fake --------------------------------------------------------------------

void FixtureGeocoder::add(std::string_view query, GeocoderHit hit) {
  hits_[normalize_query(query)] = std::move(hit);
}

std::optional<GeocoderHit> FixtureGeocoder::lookup(std::string_view query) {
  ++calls_;
  auto it = hits_.find(normalize_query(query));
  if (it == hits_.end()) return std::nullopt;
  return it->second;
}

}  // namespace medex
