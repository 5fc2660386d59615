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

// Pseudo-retrieval document sets: the target item's own rationale and/or
// rationales borrowed from unrelated items.

#ifndef RAGCAL_CONTEXTGEN_H_
#define RAGCAL_CONTEXTGEN_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "ragcal/dataset.h"

namespace ragcal {

enum class Mixture { kNone, kAns1, kAns1Oth2, kOth3 };
enum class Position { kPreQ, kAftQ, kAftC };

inline constexpr Mixture kAllMixtures[] = {Mixture::kNone, Mixture::kAns1,
                                           Mixture::kAns1Oth2, Mixture::kOth3};
inline constexpr Position kAllPositions[] = {Position::kPreQ, Position::kAftQ,
                                             Position::kAftC};

// Names used on the command line and in every output file.
std::string_view MixtureName(Mixture mixture);    // none, ans1, ans1-oth2, oth3
std::string_view PositionName(Position position);  // pre-q, aft-q, aft-c
absl::StatusOr<Mixture> ParseMixture(std::string_view name);
absl::StatusOr<Position> ParsePosition(std::string_view name);

// True for the mixtures that include the target's rationale.
bool HasAnswerDocument(Mixture mixture);
// Number of documents a mixture inserts: 0, 1, 3, 3.
int DocumentCount(Mixture mixture);

struct ScenarioSpec {
  Mixture mixture = Mixture::kNone;
  Position position = Position::kPreQ;
  uint64_t seed = 0;

  bool is_baseline() const { return mixture == Mixture::kNone; }

  // Position tag for output files. The baseline has a single rendering and is
  // always tagged "none".
  std::string_view position_tag() const;

  // Baselines collapse onto one canonical position so they compare equal.
  ScenarioSpec Canonical() const;

  friend bool operator==(const ScenarioSpec& a, const ScenarioSpec& b) {
    const ScenarioSpec ca = a.Canonical();
    const ScenarioSpec cb = b.Canonical();
    return ca.mixture == cb.mixture && ca.position == cb.position &&
           ca.seed == cb.seed;
  }
};

struct ContextDoc {
  std::string source_item_id;
  std::string text;
  bool answer_bearing = false;

  friend bool operator==(const ContextDoc&, const ContextDoc&) = default;
};

// Draws `k` distinct distractor documents from `pool`, excluding `target_id`
// and any item whose rationale is missing or textually equal to
// `target_rationale`. Each eligible item gets a pseudo-random priority keyed
// by (seed, item id); the k smallest priorities win. The result therefore does
// not depend on the pool order of unselected items.
absl::StatusOr<std::vector<ContextDoc>> SampleDistractors(
    const std::vector<QaItem>& pool, std::string_view target_id, int k,
    uint64_t seed, std::string_view target_rationale = {});

struct ContextOptions {
  // Slot of the answer-bearing document inside an Ans1-Oth2 block (0..2).
  int answer_slot = 0;
};

// Per-item seed: the run seed mixed with a stable hash of the item id.
uint64_t ItemSeed(uint64_t seed, std::string_view item_id);

// Documents for `item` under `mixture`. Distractors come from `pool`.
absl::StatusOr<std::vector<ContextDoc>> BuildContext(
    const QaItem& item, Mixture mixture, const std::vector<QaItem>& pool,
    uint64_t seed, const ContextOptions& options = {});

}  // namespace ragcal

#endif  // RAGCAL_CONTEXTGEN_H_
