// Copyright 2026 The thstar Authors
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

#ifndef THSTAR_CSV_HPP
#define THSTAR_CSV_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "thstar/errors.hpp"

namespace thstar::csv {

/// Quotes a field when it holds a comma, quote or line break.
inline std::string field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

template <typename... Fields>
std::string row(const Fields&... fields) {
  std::string out;
  bool first = true;
  ((out += (first ? "" : ","), out += field(fields), first = false), ...);
  out += '\n';
  return out;
}

/// Splits one CSV line (no embedded line breaks) into fields.
inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          out.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted CSV field", line.size());
  return out;
}

}  // namespace thstar::csv

#endif  // THSTAR_CSV_HPP
