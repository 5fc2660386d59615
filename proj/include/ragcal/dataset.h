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

// Multiple-choice QA datasets with optional rationale passages.
//
// Three line-delimited JSON layouts are understood:
//
//   generic   {"id", "question", "options": [..], "gold_index": int,
//              "rationale"?}. "gold" (an index or an option string) is
//              accepted in place of "gold_index".
//   pubmedqa  {"id" | "pubid", "QUESTION", "CONTEXTS": [..],
//              "final_decision": "yes" | "no" | "maybe"}. Options are always
//              yes/no/maybe; the contexts, joined by a blank line, become the
//              rationale.
//   medmcqa   {"id", "question", "opa".."opd", "cop": 1..4, "exp"?}. "exp"
//              becomes the rationale when non-blank.

#ifndef RAGCAL_DATASET_H_
#define RAGCAL_DATASET_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace ragcal {

inline constexpr int kMinOptions = 2;
inline constexpr int kMaxOptions = 26;

enum class DatasetFormat { kGeneric, kPubMedQa, kMedMcqa };

struct QaItem {
  std::string id;
  std::string question;
  std::vector<std::string> options;
  int gold_index = 0;
  std::optional<std::string> rationale;
  // "generic", "pubmedqa" or "medmcqa".
  std::string dataset_tag = "generic";

  int num_options() const { return static_cast<int>(options.size()); }
  bool has_rationale() const;

  friend bool operator==(const QaItem&, const QaItem&) = default;
};

absl::StatusOr<DatasetFormat> ParseDatasetFormat(std::string_view name);
std::string_view DatasetFormatName(DatasetFormat format);

// Checks the per-item invariants (option count, gold range, non-blank
// rationale).
absl::Status ValidateItem(const QaItem& item);

// Loads every record of a line-delimited JSON file. Blank lines are skipped.
// Any malformed record fails the whole load with its 1-based line number.
absl::StatusOr<std::vector<QaItem>> LoadDataset(const std::string& path,
                                                DatasetFormat format);

// Same as LoadDataset but reads from an in-memory buffer.
absl::StatusOr<std::vector<QaItem>> ParseDataset(std::string_view contents,
                                                 DatasetFormat format);

// Items whose rationale is present and non-blank, in input order.
std::vector<QaItem> FilterWithRationale(const std::vector<QaItem>& items);

// Serializes items in the generic layout, one record per line.
std::string SerializeGeneric(const std::vector<QaItem>& items);
absl::Status WriteGenericDataset(const std::vector<QaItem>& items,
                                 const std::string& path);

}  // namespace ragcal

#endif  // RAGCAL_DATASET_H_
