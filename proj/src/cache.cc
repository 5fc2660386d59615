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

#include "ragcal/cache.h"

#include <cctype>
#include <chrono>
#include <cmath>
#include <filesystem>

#include "fmt/format.h"
#include "nlohmann/json.hpp"
#include "ragcal/hashing.h"
#include "ragcal/records.h"
#include "ragcal/text.h"

namespace ragcal {
namespace {

void AppendLengthPrefixed(std::string* out, std::string_view field) {
  uint64_t length = field.size();
  for (int i = 0; i < 8; ++i) {
    out->push_back(static_cast<char>(length & 0xff));
    length >>= 8;
  }
  out->append(field);
}

bool IsHexKey(std::string_view key) {
  if (key.size() != 64) return false;
  for (char c : key) {
    if (!std::isxdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

std::string CacheKey(std::string_view backend_name,
                     std::string_view prompt_text,
                     const std::vector<std::string>& labels) {
  std::string message = "ragcal-score-cache-v1";
  AppendLengthPrefixed(&message, backend_name);
  AppendLengthPrefixed(&message, prompt_text);
  AppendLengthPrefixed(&message, StrCat(labels.size()));
  for (const std::string& label : labels) AppendLengthPrefixed(&message, label);
  return Sha256Hex(message);
}

std::string ScoreCache::FileName(std::string_view backend_name) {
  std::string safe;
  for (char c : backend_name) {
    safe += std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
                    c == '.'
                ? c
                : '_';
  }
  if (safe.size() > 64) safe.resize(64);
  return fmt::format("{}-{:08x}.jsonl", safe,
                         Fnv1a64(backend_name) & 0xffffffffULL);
}

absl::StatusOr<std::unique_ptr<ScoreCache>> ScoreCache::Open(
    const std::string& directory, std::string_view backend_name) {
  std::error_code error;
  std::filesystem::create_directories(directory, error);
  if (error) {
    return absl::UnavailableError(StrCat(
        "cannot create cache directory \"", directory, "\": ", error.message()));
  }
  std::unique_ptr<ScoreCache> cache(new ScoreCache());
  cache->path_ =
      (std::filesystem::path(directory) / FileName(backend_name)).string();

  bool needs_newline = false;
  if (std::filesystem::exists(cache->path_)) {
    auto contents = ReadFile(cache->path_);
    if (!contents.ok()) return contents.status();
    needs_newline = !contents->empty() && contents->back() != '\n';
    for (std::string_view line : Split(*contents, '\n')) {
      if (IsBlank(line)) continue;
      const nlohmann::json entry =
          nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
      bool valid = entry.is_object() && entry.contains("key") &&
                   entry["key"].is_string() && entry.contains("v") &&
                   entry["v"].is_array() &&
                   IsHexKey(entry["key"].get<std::string>());
      std::vector<double> v;
      if (valid) {
        for (const auto& value : entry["v"]) {
          if (!value.is_number() || !std::isfinite(value.get<double>())) {
            valid = false;
            break;
          }
          v.push_back(value.get<double>());
        }
      }
      if (!valid || v.empty()) {
        ++cache->skipped_lines_;
        continue;
      }
      cache->entries_[entry["key"].get<std::string>()] = std::move(v);
    }
  }
  cache->out_.open(cache->path_, std::ios::binary | std::ios::app);
  if (!cache->out_) {
    return absl::UnavailableError(
        StrCat("cannot open cache file \"", cache->path_, "\""));
  }
  // A crash can leave a half-written last line; start a fresh one.
  if (needs_newline) cache->out_ << '\n' << std::flush;
  return cache;
}

std::optional<std::vector<double>> ScoreCache::Lookup(
    const std::string& key) const {
  std::shared_lock<std::shared_mutex> lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

absl::Status ScoreCache::Append(const std::string& key,
                                const std::vector<double>& v) {
  const int64_t timestamp =
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count();
  const std::string line =
      nlohmann::json{{"key", key}, {"v", v}, {"timestamp", timestamp}}.dump();
  std::unique_lock<std::shared_mutex> lock(mutex_);
  out_ << line << '\n' << std::flush;
  if (!out_) {
    return absl::DataLossError(
        StrCat("cannot append to cache file \"", path_, "\""));
  }
  entries_[key] = v;
  return absl::OkStatus();
}

size_t ScoreCache::size() const {
  std::shared_lock<std::shared_mutex> lock(mutex_);
  return entries_.size();
}

}  // namespace ragcal
