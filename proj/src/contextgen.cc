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

#include "ragcal/contextgen.h"

#include <algorithm>
#include <tuple>

#include "ragcal/hashing.h"
#include "ragcal/text.h"

namespace ragcal {

std::string_view MixtureName(Mixture mixture) {
  switch (mixture) {
    case Mixture::kNone:
      return "none";
    case Mixture::kAns1:
      return "ans1";
    case Mixture::kAns1Oth2:
      return "ans1-oth2";
    case Mixture::kOth3:
      return "oth3";
  }
  return "none";
}

std::string_view PositionName(Position position) {
  switch (position) {
    case Position::kPreQ:
      return "pre-q";
    case Position::kAftQ:
      return "aft-q";
    case Position::kAftC:
      return "aft-c";
  }
  return "pre-q";
}

absl::StatusOr<Mixture> ParseMixture(std::string_view name) {
  for (Mixture mixture : kAllMixtures) {
    if (name == MixtureName(mixture)) return mixture;
  }
  return absl::InvalidArgumentError(StrCat(
      "unknown mixture \"", name, "\" (expected none, ans1, ans1-oth2, oth3)"));
}

absl::StatusOr<Position> ParsePosition(std::string_view name) {
  for (Position position : kAllPositions) {
    if (name == PositionName(position)) return position;
  }
  return absl::InvalidArgumentError(StrCat(
      "unknown position \"", name, "\" (expected pre-q, aft-q, aft-c)"));
}

bool HasAnswerDocument(Mixture mixture) {
  return mixture == Mixture::kAns1 || mixture == Mixture::kAns1Oth2;
}

int DocumentCount(Mixture mixture) {
  switch (mixture) {
    case Mixture::kNone:
      return 0;
    case Mixture::kAns1:
      return 1;
    case Mixture::kAns1Oth2:
    case Mixture::kOth3:
      return 3;
  }
  return 0;
}

std::string_view ScenarioSpec::position_tag() const {
  return is_baseline() ? std::string_view("none") : PositionName(position);
}

ScenarioSpec ScenarioSpec::Canonical() const {
  ScenarioSpec canonical = *this;
  if (is_baseline()) canonical.position = Position::kPreQ;
  return canonical;
}

absl::StatusOr<std::vector<ContextDoc>> SampleDistractors(
    const std::vector<QaItem>& pool, std::string_view target_id, int k,
    uint64_t seed, std::string_view target_rationale) {
  if (k < 0) {
    return absl::InvalidArgumentError("distractor count must be >= 0");
  }
  // (priority, id, pool index). Ties on priority fall back to the id so the
  // ordering is total and independent of pool order.
  std::vector<std::tuple<uint64_t, std::string_view, size_t>> eligible;
  for (size_t i = 0; i < pool.size(); ++i) {
    const QaItem& candidate = pool[i];
    if (candidate.id == target_id || !candidate.has_rationale()) continue;
    if (!target_rationale.empty() && *candidate.rationale == target_rationale) {
      continue;
    }
    eligible.emplace_back(MixSeeds(seed, Fnv1a64(candidate.id)), candidate.id,
                          i);
  }
  if (static_cast<int>(eligible.size()) < k) {
    return absl::FailedPreconditionError(StrCat(
        "insufficient distractor pool: need ", k, " items other than \"",
        target_id, "\" with rationales, have ", eligible.size()));
  }
  std::partial_sort(eligible.begin(), eligible.begin() + k, eligible.end());
  std::vector<ContextDoc> docs;
  docs.reserve(k);
  for (int i = 0; i < k; ++i) {
    const QaItem& source = pool[std::get<2>(eligible[i])];
    docs.push_back({source.id, *source.rationale, /*answer_bearing=*/false});
  }
  return docs;
}

uint64_t ItemSeed(uint64_t seed, std::string_view item_id) {
  return MixSeeds(seed, Fnv1a64(item_id));
}

absl::StatusOr<std::vector<ContextDoc>> BuildContext(
    const QaItem& item, Mixture mixture, const std::vector<QaItem>& pool,
    uint64_t seed, const ContextOptions& options) {
  if (mixture == Mixture::kNone) return std::vector<ContextDoc>{};
  if (HasAnswerDocument(mixture) && !item.has_rationale()) {
    return absl::FailedPreconditionError(
        StrCat("item \"", item.id, "\" has no rationale; mixture ",
                     MixtureName(mixture), " needs one"));
  }
  const int num_distractors =
      DocumentCount(mixture) - (HasAnswerDocument(mixture) ? 1 : 0);
  const std::string_view own_rationale =
      item.has_rationale() ? std::string_view(*item.rationale)
                           : std::string_view();
  auto distractors = SampleDistractors(pool, item.id, num_distractors,
                                       ItemSeed(seed, item.id), own_rationale);
  if (!distractors.ok()) return distractors.status();
  if (!HasAnswerDocument(mixture)) return distractors;

  if (options.answer_slot < 0 || options.answer_slot > 2) {
    return absl::InvalidArgumentError(StrCat(
        "answer slot ", options.answer_slot, " out of range 0..2"));
  }
  // Ans1 has a single slot.
  const int slot = std::min(options.answer_slot, num_distractors);
  std::vector<ContextDoc> docs = *std::move(distractors);
  docs.insert(docs.begin() + slot,
              ContextDoc{item.id, *item.rationale, /*answer_bearing=*/true});
  return docs;
}

}  // namespace ragcal
