// Copyright 2026 The ragcal Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small std::string_view helpers. The system abseil is built with its own
// string_view type, so its string utilities do not accept std::string_view.

#ifndef RAGCAL_TEXT_H_
#define RAGCAL_TEXT_H_

#include <iterator>
#include <string>
#include <utility>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "fmt/format.h"
#include "fmt/ranges.h"

namespace ragcal {

namespace text_internal {
template <typename T>
T&& Formattable(T&& value) {
  return std::forward<T>(value);
}
inline std::string_view Formattable(absl::string_view value) {
  return std::string_view(value.data(), value.size());
}
}  // namespace text_internal

// Concatenates the "{}" formatting of every argument.
template <typename... Args>
void StrAppend(std::string* out, Args&&... args) {
  (fmt::format_to(std::back_inserter(*out), "{}",
                  text_internal::Formattable(std::forward<Args>(args))),
   ...);
}

template <typename... Args>
std::string StrCat(Args&&... args) {
  std::string out;
  StrAppend(&out, std::forward<Args>(args)...);
  return out;
}

inline bool IsAsciiSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

inline std::string_view Trim(std::string_view text) {
  while (!text.empty() && IsAsciiSpace(text.front())) text.remove_prefix(1);
  while (!text.empty() && IsAsciiSpace(text.back())) text.remove_suffix(1);
  return text;
}

inline bool IsBlank(std::string_view text) { return Trim(text).empty(); }

// Splits on `delimiter`, keeping empty pieces.
inline std::vector<std::string_view> Split(std::string_view text,
                                           char delimiter) {
  std::vector<std::string_view> pieces;
  size_t start = 0;
  while (true) {
    const size_t end = text.find(delimiter, start);
    if (end == std::string_view::npos) {
      pieces.push_back(text.substr(start));
      return pieces;
    }
    pieces.push_back(text.substr(start, end - start));
    start = end + 1;
  }
}

// Comma list with surrounding whitespace trimmed and empty entries dropped.
inline std::vector<std::string> SplitList(std::string_view text) {
  std::vector<std::string> entries;
  for (std::string_view piece : Split(text, ',')) {
    piece = Trim(piece);
    if (!piece.empty()) entries.emplace_back(piece);
  }
  return entries;
}

inline std::string ToLower(std::string_view text) {
  std::string lower(text);
  for (char& c : lower) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return lower;
}

// Status message as a std::string.
inline std::string Message(const absl::Status& status) {
  return std::string(status.message());
}

// Same code, message prefixed with `context: `.
inline absl::Status Annotate(const absl::Status& status,
                             std::string_view context) {
  return absl::Status(status.code(),
                      std::string(context) + ": " + Message(status));
}

}  // namespace ragcal

#endif  // RAGCAL_TEXT_H_
