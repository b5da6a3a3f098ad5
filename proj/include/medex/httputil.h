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

#ifndef MEDEX_HTTPUTIL_H_
#define MEDEX_HTTPUTIL_H_

#include <string>
#include <string_view>

namespace medex {

struct HttpEndpoint {
  std::string origin;       // "http://host:port"
  std::string path_prefix;  // "" or "/nominatim", never a trailing '/'
};

// "http://localhost:9000/api/" -> {"http://localhost:9000", "/api"}.
// A missing scheme defaults to http.
inline HttpEndpoint split_url(std::string_view url) {
  std::string u(url);
  if (u.find("://") == std::string::npos) u = "http://" + u;
  size_t host_start = u.find("://") + 3;
  size_t slash = u.find('/', host_start);
  HttpEndpoint ep;
  if (slash == std::string::npos) {
    ep.origin = u;
  } else {
    ep.origin = u.substr(0, slash);
    ep.path_prefix = u.substr(slash);
    while (!ep.path_prefix.empty() && ep.path_prefix.back() == '/')
      ep.path_prefix.pop_back();
  }
  return ep;
}

}  // namespace medex

#endif  // MEDEX_HTTPUTIL_H_
