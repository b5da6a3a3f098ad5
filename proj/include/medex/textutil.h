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

#ifndef MEDEX_TEXTUTIL_H_
#define MEDEX_TEXTUTIL_H_

#include <string>
#include <string_view>
#include <vector>

namespace medex {

// ASCII lowercase.
std::string to_lower(std::string_view s);

std::string_view trim(std::string_view s);

// Splits on whitespace and peels leading/trailing punctuation off into
// separate tokens ("car," -> "car", ","). Lowercases when asked.
std::vector<std::string> simple_tokenize(std::string_view text,
                                         bool lowercase = true);

// Penn Treebank punctuation tags (, . : `` '' -LRB- -RRB- # $ HYPH).
bool is_punct_tag(std::string_view pos);

bool is_adjective_tag(std::string_view pos);
bool is_adverb_tag(std::string_view pos);
bool is_verb_tag(std::string_view pos);
bool is_noun_tag(std::string_view pos);

// Reads a whole file; throws IoError.
std::string read_file(const std::string &path);

}  // namespace medex

#endif  // MEDEX_TEXTUTIL_H_
