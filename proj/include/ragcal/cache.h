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

// Append-only score cache, one line-delimited JSON file per backend.
//
// Each line is {"key": <sha256 hex>, "v": [..], "timestamp": <unix s>}. A
// line that fails to parse (for example one truncated by a crash) is skipped
// on load; the rest of the file stays usable.

#ifndef RAGCAL_CACHE_H_
#define RAGCAL_CACHE_H_

#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "absl/status/statusor.h"

namespace ragcal {

// SHA-256 over length-prefixed (backend name, prompt text, labels...).
// Sensitive to label order.
std::string CacheKey(std::string_view backend_name,
                     std::string_view prompt_text,
                     const std::vector<std::string>& labels);

class ScoreCache {
 public:
  // Opens (creating if needed) the cache file for `backend_name` inside
  // `directory`.
  static absl::StatusOr<std::unique_ptr<ScoreCache>> Open(
      const std::string& directory, std::string_view backend_name);

  // Cache file name for a backend: sanitized name plus a short hash.
  static std::string FileName(std::string_view backend_name);

  std::optional<std::vector<double>> Lookup(const std::string& key) const;

  // Appends and flushes one entry. Safe to call from several threads; writes
  // are serialized.
  absl::Status Append(const std::string& key, const std::vector<double>& v);

  size_t size() const;
  int skipped_lines() const { return skipped_lines_; }
  const std::string& path() const { return path_; }

 private:
  ScoreCache() = default;

  std::string path_;
  std::ofstream out_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, std::vector<double>> entries_;
  int skipped_lines_ = 0;
};

}  // namespace ragcal

#endif  // RAGCAL_CACHE_H_
