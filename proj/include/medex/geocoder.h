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

// Geocoding against a Nominatim-compatible search endpoint.
//
// Responses are cached in an append-only JSON-lines file, one
// {"query": ..., "response": ...} record per line, keyed by the normalized
// query. A cache file with no service URL behind it acts as a fixture: known
// queries resolve, unknown ones return no match.

#ifndef MEDEX_GEOCODER_H_
#define MEDEX_GEOCODER_H_

#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "medex/canonicalize.h"

namespace medex {

struct GeocoderHit {
  double lat = 0;
  double lon = 0;
  BoundingBox bbox;
  std::string place_id;
  std::string display_name;
};

class GeocoderClient {
 public:
  virtual ~GeocoderClient() = default;
  // Top-ranked match for the query, or nullopt when there is none. Throws
  // NetworkError when the service cannot be reached.
  virtual std::optional<GeocoderHit> lookup(std::string_view query) = 0;
};

// Lowercased, whitespace-collapsed form used as the cache key.
std::string normalize_query(std::string_view query);

// Maps a Nominatim JSON search response (an array) to its first hit.
// Throws ProtocolError on malformed payloads.
std::optional<GeocoderHit> parse_nominatim_response(std::string_view body);

// Resolves a merged location phrase. The span is left default; callers set it.
std::optional<Geocode> geocode(std::string_view phrase, GeocoderClient &client);

// Thread-safe (query -> raw response) store, optionally persisted.
class GeocodeCache {
 public:
  GeocodeCache() = default;
  // Loads existing records; the file is created on first store().
  explicit GeocodeCache(std::string path);

  std::optional<std::string> find(std::string_view query) const;
  void store(std::string_view query, const std::string &response);
  size_t size() const;

 private:
  std::string path_;
  mutable std::shared_mutex mu_;
  std::mutex file_mu_;
  std::map<std::string, std::string, std::less<>> entries_;
};

struct NominatimOptions {
  // Base URL such as "https://nominatim.openstreetmap.org". Empty means
  // offline: only cached responses are served.
  std::string url;
  std::chrono::milliseconds min_interval{1000};
  std::chrono::seconds timeout{10};
  std::string user_agent = "medex/1.0";
};

class NominatimClient : public GeocoderClient {
 public:
  NominatimClient(NominatimOptions options, GeocodeCache *cache);

  std::optional<GeocoderHit> lookup(std::string_view query) override;

  int network_calls() const { return network_calls_.load(); }

 private:
  std::string fetch(const std::string &query);

  NominatimOptions options_;
  GeocodeCache *cache_;
  std::atomic<int> network_calls_{0};
};

// In-memory fake keyed by normalized query.
class FixtureGeocoder : public GeocoderClient {
 public:
  void add(std::string_view query, GeocoderHit hit);
  std::optional<GeocoderHit> lookup(std::string_view query) override;
  int calls() const { return calls_.load(); }

 private:
  std::map<std::string, GeocoderHit, std::less<>> hits_;
  std::atomic<int> calls_{0};
};

}  // namespace medex

#endif  // MEDEX_GEOCODER_H_
