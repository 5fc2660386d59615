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
#include <random>
#include <set>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace ragcal {
namespace {

using ::testing::HasSubstr;

TEST(ContextgenTest, NamesRoundTrip) {
  for (Mixture mixture : kAllMixtures) {
    auto parsed = ParseMixture(MixtureName(mixture));
    ASSERT_TRUE(parsed.ok());
    EXPECT_EQ(*parsed, mixture);
  }
  for (Position position : kAllPositions) {
    auto parsed = ParsePosition(PositionName(position));
    ASSERT_TRUE(parsed.ok());
    EXPECT_EQ(*parsed, position);
  }
  EXPECT_FALSE(ParseMixture("ans2").ok());
  EXPECT_FALSE(ParsePosition("end").ok());
}

TEST(ContextgenTest, BaselineScenariosCollapse) {
  const ScenarioSpec a{Mixture::kNone, Position::kAftC, 3};
  const ScenarioSpec b{Mixture::kNone, Position::kPreQ, 3};
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.position_tag(), "none");
  const ScenarioSpec c{Mixture::kOth3, Position::kAftC, 3};
  EXPECT_EQ(c.position_tag(), "aft-c");
  EXPECT_FALSE(c == (ScenarioSpec{Mixture::kOth3, Position::kAftQ, 3}));
}

TEST(ContextgenTest, DocumentCountsAndAnswerPlacement) {
  const std::vector<QaItem> pool = testing::MakeItems(10);
  const QaItem& target = pool[4];
  const int expected_counts[] = {0, 1, 3, 3};
  const int expected_answers[] = {0, 1, 1, 0};
  for (int m = 0; m < 4; ++m) {
    const Mixture mixture = kAllMixtures[m];
    auto docs = BuildContext(target, mixture, pool, /*seed=*/11);
    ASSERT_TRUE(docs.ok()) << docs.status();
    EXPECT_EQ(static_cast<int>(docs->size()), expected_counts[m]);
    EXPECT_EQ(DocumentCount(mixture), expected_counts[m]);
    int answers = 0;
    std::set<std::string> sources;
    for (const ContextDoc& doc : *docs) {
      sources.insert(doc.source_item_id);
      if (doc.answer_bearing) {
        ++answers;
        EXPECT_EQ(doc.source_item_id, target.id);
        EXPECT_EQ(doc.text, *target.rationale);
      } else {
        EXPECT_NE(doc.source_item_id, target.id);
        EXPECT_NE(doc.text, *target.rationale);
      }
    }
    EXPECT_EQ(answers, expected_answers[m]);
    EXPECT_EQ(sources.size(), docs->size()) << "duplicate document";
  }
}

TEST(ContextgenTest, DeterministicAndPoolOrderIndependent) {
  std::vector<QaItem> pool = testing::MakeItems(50);
  const QaItem target = pool[17];
  auto first = BuildContext(target, Mixture::kOth3, pool, 99);
  ASSERT_TRUE(first.ok());
  auto again = BuildContext(target, Mixture::kOth3, pool, 99);
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(*first, *again);

  std::mt19937 rng(5);
  std::shuffle(pool.begin(), pool.end(), rng);
  auto shuffled = BuildContext(target, Mixture::kOth3, pool, 99);
  ASSERT_TRUE(shuffled.ok());
  EXPECT_EQ(*first, *shuffled);

  // A different seed should pick a different set for at least one item.
  bool any_differs = false;
  for (int i = 0; i < 10 && !any_differs; ++i) {
    auto a = BuildContext(pool[i], Mixture::kOth3, pool, 1);
    auto b = BuildContext(pool[i], Mixture::kOth3, pool, 2);
    ASSERT_TRUE(a.ok() && b.ok());
    any_differs = *a != *b;
  }
  EXPECT_TRUE(any_differs);
}

TEST(ContextgenTest, ExcludesItemsWithoutRationaleOrSameText) {
  std::vector<QaItem> pool = testing::MakeItems(6);
  pool[1].rationale.reset();
  pool[2].rationale = pool[0].rationale;  // same passage as the target
  auto docs = SampleDistractors(pool, pool[0].id, 3, 8, *pool[0].rationale);
  ASSERT_TRUE(docs.ok()) << docs.status();
  std::set<std::string> ids;
  for (const ContextDoc& doc : *docs) ids.insert(doc.source_item_id);
  EXPECT_EQ(ids, (std::set<std::string>{pool[3].id, pool[4].id, pool[5].id}));
}

TEST(ContextgenTest, InsufficientPoolIsAnError) {
  const std::vector<QaItem> pool = testing::MakeItems(3);
  auto docs = BuildContext(pool[0], Mixture::kOth3, pool, 0);
  ASSERT_FALSE(docs.ok());
  EXPECT_EQ(docs.status().code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_THAT(std::string(docs.status().message()),
              HasSubstr("insufficient distractor pool"));
  // Two distractors are still available for Ans1-Oth2.
  EXPECT_TRUE(BuildContext(pool[0], Mixture::kAns1Oth2, pool, 0).ok());
}

TEST(ContextgenTest, AnswerMixtureNeedsRationale) {
  std::vector<QaItem> pool = testing::MakeItems(5);
  pool[0].rationale.reset();
  EXPECT_FALSE(BuildContext(pool[0], Mixture::kAns1, pool, 0).ok());
  EXPECT_TRUE(BuildContext(pool[0], Mixture::kOth3, pool, 0).ok());
}

TEST(ContextgenTest, AnswerSlot) {
  const std::vector<QaItem> pool = testing::MakeItems(8);
  for (int slot = 0; slot < 3; ++slot) {
    auto docs = BuildContext(pool[2], Mixture::kAns1Oth2, pool, 4,
                             ContextOptions{slot});
    ASSERT_TRUE(docs.ok());
    for (int i = 0; i < 3; ++i) {
      EXPECT_EQ((*docs)[i].answer_bearing, i == slot);
    }
    auto single =
        BuildContext(pool[2], Mixture::kAns1, pool, 4, ContextOptions{slot});
    ASSERT_TRUE(single.ok());
    ASSERT_EQ(single->size(), 1u);
    EXPECT_TRUE((*single)[0].answer_bearing);
  }
  EXPECT_FALSE(
      BuildContext(pool[2], Mixture::kAns1Oth2, pool, 4, ContextOptions{3})
          .ok());
}

}  // namespace
}  // namespace ragcal
