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

#ifndef RAGCAL_RECORDS_H_
#define RAGCAL_RECORDS_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "ragcal/contextgen.h"

namespace ragcal {

enum class BackendKind { kSynthetic, kRemote };

std::string_view BackendKindName(BackendKind kind);

struct BackendId {
  BackendKind kind = BackendKind::kSynthetic;
  std::string name;

  friend bool operator==(const BackendId&, const BackendId&) = default;
};

// One scored prompt: the unit every metric and report consumes.
struct PredictionRecord {
  std::string item_id;
  std::string dataset;
  ScenarioSpec scenario;
  BackendId backend;
  int chosen_index = 0;
  int gold_index = 0;
  bool correct = false;
  double entropy = 0.0;  // nats
  double best_prob = 0.0;
  std::vector<double> p;
  // Raw backend scores, kept for audit.
  std::vector<double> v;

  int num_classes() const { return static_cast<int>(p.size()); }
};

// Line-delimited JSON, one record per line, doubles written with round-trip
// precision.
std::string SerializeRecords(const std::vector<PredictionRecord>& records);
absl::StatusOr<std::vector<PredictionRecord>> ParseRecords(
    std::string_view contents);
absl::Status WriteRecords(const std::vector<PredictionRecord>& records,
                          const std::string& path);
absl::StatusOr<std::vector<PredictionRecord>> ReadRecords(
    const std::string& path);

// Writes `contents` to `path` atomically (temp file + rename).
absl::Status WriteFileAtomically(const std::string& path,
                                 std::string_view contents);
absl::StatusOr<std::string> ReadFile(const std::string& path);

}  // namespace ragcal

#endif  // RAGCAL_RECORDS_H_
