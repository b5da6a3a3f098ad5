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

#include "medex/textutil.h"

#include <cctype>
#include <fstream>
#include <sstream>

#include "medex/errors.h"

namespace medex {

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string> simple_tokenize(std::string_view text, bool lowercase) {
  std::vector<std::string> out;
  auto is_punct = [](char c) {
    return std::ispunct(static_cast<unsigned char>(c)) && c != '-' && c != '\'';
  };
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::string_view word = text.substr(start, i - start);
    if (word.empty()) continue;
    std::vector<std::string> tail;
    while (!word.empty() && is_punct(word.front())) {
      out.emplace_back(1, word.front());
      word.remove_prefix(1);
    }
    while (!word.empty() && is_punct(word.back())) {
      tail.emplace_back(1, word.back());
      word.remove_suffix(1);
    }
    if (!word.empty()) out.emplace_back(word);
    out.insert(out.end(), tail.rbegin(), tail.rend());
  }
  if (lowercase)
    for (auto &t : out) t = to_lower(t);
  return out;
}

bool is_punct_tag(std::string_view pos) {
  return pos == "," || pos == "." || pos == ":" || pos == "``" ||
         pos == "''" || pos == "-LRB-" || pos == "-RRB-" || pos == "#" ||
         pos == "$" || pos == "HYPH" || pos == "NFP";
}

bool is_adjective_tag(std::string_view pos) {
  return pos == "JJ" || pos == "JJR" || pos == "JJS";
}

bool is_adverb_tag(std::string_view pos) {
  return pos == "RB" || pos == "RBR" || pos == "RBS";
}

bool is_verb_tag(std::string_view pos) { return pos.substr(0, 2) == "VB"; }

bool is_noun_tag(std::string_view pos) { return pos.substr(0, 2) == "NN"; }

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for '" + path + "'");
  return ss.str();
}

}  // namespace medex
