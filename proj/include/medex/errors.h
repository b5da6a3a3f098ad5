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

#ifndef MEDEX_ERRORS_H_
#define MEDEX_ERRORS_H_

#include <stdexcept>
#include <string>

namespace medex {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed interchange document. what() starts with the offending path,
// e.g. "sentences[1].tokens[3].char_end: ...".
class SchemaError : public Error {
 public:
  SchemaError(const std::string &path, const std::string &message)
      : Error(path + ": " + message), path_(path) {}
  const std::string &path() const { return path_; }

 private:
  std::string path_;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Upstream service unreachable or timed out.
class NetworkError : public Error {
 public:
  using Error::Error;
};

// Upstream service answered, but not with what was asked for.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DegenerateDocument : public Error {
 public:
  using Error::Error;
};

class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// Phrase has no token in the embedding vocabulary.
class AllOovError : public Error {
 public:
  using Error::Error;
};

class ArityError : public Error {
 public:
  using Error::Error;
};

}  // namespace medex

#endif  // MEDEX_ERRORS_H_
