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


#include "ragcal/report.h"

#include <cmath>
#include <map>
#include <random>
#include <string>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "oracles.h"
#include "ragcal/backends.h"
#include "ragcal/metrics.h"
#include "ragcal/prompt.h"
#include "ragcal/text.h"
#include "test_util.h"

namespace ragcal {
namespace {

using ::testing::HasSubstr;

// Records for every grid cell of `items`, scored by `config` without going
// through the runner.
std::vector<PredictionRecord> SyntheticRecords(const std::vector<QaItem>& items,
                                               const SyntheticConfig& config) {
  const BackendId backend{BackendKind::kSynthetic, SyntheticBackendName(config)};
  std::vector<PredictionRecord> records;
  for (const QaItem& item : items) {
    for (Mixture mixture : kAllMixtures) {
      for (Position position : kAllPositions) {
        if (mixture == Mixture::kNone && position != Position::kPreQ) continue;
        const ScenarioSpec scenario{mixture, position, config.seed};
        auto record = MakeRecord(
            item, scenario, backend,
            SynthScore(config, item, scenario, HasAnswerDocument(mixture)));
        EXPECT_TRUE(record.ok());
        records.push_back(*std::move(record));
      }
    }
  }
  return records;
}

TEST(MeanStdTest, TwoPoints) {
  auto stats = ComputeMeanStd({1.0, 1.2});
  ASSERT_TRUE(stats.has_value());
  EXPECT_NEAR(stats->mean, 1.1, 1e-15);
  EXPECT_NEAR(stats->stddev, 0.1, 1e-15);
  EXPECT_FALSE(ComputeMeanStd({}).has_value());
}

TEST(AggregateTest, TwoCorrectRecords) {
  std::vector<PredictionRecord> records = {
      testing::OracleRecord(0, {0.9, 0.1}, 0),
      testing::OracleRecord(1, {0.8, 0.2}, 0)};
  records[0].entropy = 1.0;
  records[1].entropy = 1.2;
  auto reports = Aggregate(records);
  ASSERT_TRUE(reports.ok());
  ASSERT_EQ(reports->size(), 1u);
  const MetricReport& report = (*reports)[0];
  EXPECT_EQ(report.n_correct, 2);
  EXPECT_EQ(report.n_incorrect, 0);
  EXPECT_NEAR(report.entropy_correct->mean, 1.1, 1e-15);
  EXPECT_NEAR(report.entropy_correct->stddev, 0.1, 1e-15);
  EXPECT_FALSE(report.entropy_incorrect.has_value());
  EXPECT_FALSE(report.best_prob_incorrect.has_value());
  // The baseline compares against itself.
  EXPECT_EQ(report.delta_accuracy, 0.0);
  EXPECT_EQ(report.delta_ace, 0.0);
  EXPECT_THAT(ReportCsv(*reports), HasSubstr(",--,--,--,--,0,0\n"));
  EXPECT_THAT(ReportMarkdown(*reports), HasSubstr("1.100±0.100"));
}

TEST(AggregateTest, GroupIdenticalToBaselineHasZeroDeltas) {
  std::vector<PredictionRecord> records;
  std::mt19937_64 rng(1);
  auto baseline = testing::RandomRecords(rng, 30, 4);
  for (PredictionRecord record : baseline) {
    records.push_back(record);
    record.scenario = ScenarioSpec{Mixture::kOth3, Position::kAftQ};
    records.push_back(record);
  }
  auto reports = Aggregate(records);
  ASSERT_TRUE(reports.ok());
  ASSERT_EQ(reports->size(), 2u);
  for (const MetricReport& report : *reports) {
    EXPECT_EQ(*report.delta_accuracy, 0.0);
    EXPECT_EQ(*report.delta_ace, 0.0);
  }
}

TEST(AggregateTest, NoBaselineMeansNoDeltas) {
  std::mt19937_64 rng(2);
  auto records = testing::RandomRecords(rng, 10, 3);
  for (PredictionRecord& record : records) {
    record.scenario = ScenarioSpec{Mixture::kAns1, Position::kAftC};
  }
  auto reports = Aggregate(records);
  ASSERT_TRUE(reports.ok());
  EXPECT_FALSE((*reports)[0].delta_accuracy.has_value());
  EXPECT_THAT(ReportCsv(*reports), ::testing::EndsWith(",--,--\n"));
}

MeanStd NaiveMeanStd(const std::vector<double>& values) {
  double sum = 0.0;
  for (double value : values) sum += value;
  const double mean = sum / values.size();
  double squares = 0.0;
  for (double value : values) squares += (value - mean) * (value - mean);
  return {mean, std::sqrt(squares / values.size())};
}

TEST(AggregateTest, MatchesBruteForceRecomputation) {
  const std::vector<QaItem> items = testing::MakeItems(500);
  const auto records = SyntheticRecords(items, {0.0, 2.0, 0.5, 42});
  const MetricConfig config{10, 10};
  auto reports = Aggregate(records, config);
  ASSERT_TRUE(reports.ok());
  ASSERT_EQ(reports->size(), 10u);

  std::map<std::pair<int, int>, std::vector<PredictionRecord>> groups;
  for (const PredictionRecord& record : records) {
    groups[{static_cast<int>(record.scenario.mixture),
            static_cast<int>(record.scenario.position)}]
        .push_back(record);
  }
  double baseline_accuracy = 0.0;
  double baseline_ace = 0.0;
  for (const MetricReport& report : *reports) {
    if (report.key.mixture == Mixture::kNone) {
      baseline_accuracy = report.accuracy;
      baseline_ace = report.ace;
    }
  }
  for (const MetricReport& report : *reports) {
    SCOPED_TRACE(StrCat(MixtureName(report.key.mixture), "/",
                        report.key.position_tag()));
    const auto& group = groups.at({static_cast<int>(report.key.mixture),
                                   static_cast<int>(report.key.position)});
    std::vector<double> h_correct, h_wrong, b_correct, b_wrong;
    for (const PredictionRecord& record : group) {
      (record.correct ? h_correct : h_wrong).push_back(record.entropy);
      (record.correct ? b_correct : b_wrong).push_back(record.best_prob);
    }
    EXPECT_EQ(report.n_correct, static_cast<int>(h_correct.size()));
    EXPECT_EQ(report.n_incorrect, static_cast<int>(h_wrong.size()));
    EXPECT_NEAR(report.accuracy,
                static_cast<double>(h_correct.size()) / group.size(), 1e-15);
    EXPECT_NEAR(report.ece, testing::OracleEce(group, 10), 1e-9);
    EXPECT_NEAR(report.ace, testing::OracleAce(group, 10), 1e-9);
    auto check = [](const std::optional<MeanStd>& got,
                    const std::vector<double>& values) {
      ASSERT_EQ(got.has_value(), !values.empty());
      if (values.empty()) return;
      const MeanStd want = NaiveMeanStd(values);
      EXPECT_NEAR(got->mean, want.mean, 1e-12);
      EXPECT_NEAR(got->stddev, want.stddev, 1e-12);
    };
    check(report.entropy_correct, h_correct);
    check(report.entropy_incorrect, h_wrong);
    check(report.best_prob_correct, b_correct);
    check(report.best_prob_incorrect, b_wrong);
    EXPECT_NEAR(*report.delta_accuracy, report.accuracy - baseline_accuracy,
                1e-15);
    EXPECT_NEAR(*report.delta_ace, report.ace - baseline_ace, 1e-15);
  }
}

TEST(AggregateTest, FoldIsOrderIndependent) {
  const std::vector<QaItem> items = testing::MakeItems(60);
  const auto records = SyntheticRecords(items, {0.5, 1.0, 1.0, 3});
  std::vector<PredictionRecord> reversed(records.rbegin(), records.rend());
  std::vector<PredictionRecord> halves(records.begin() + records.size() / 2,
                                       records.end());
  halves.insert(halves.end(), records.begin(),
                records.begin() + records.size() / 2);
  const std::string expected = ReportCsv(*Aggregate(records));
  EXPECT_EQ(ReportCsv(*Aggregate(reversed)), expected);
  EXPECT_EQ(ReportCsv(*Aggregate(halves)), expected);
}

TEST(ViolinTest, RowsAndDeterminism) {
  const std::vector<QaItem> items = testing::MakeItems(1);
  const auto records = SyntheticRecords(items, {0.0, 2.0, 0.5, 1});
  ASSERT_EQ(records.size(), 10u);
  const std::string csv = ViolinCsv(records);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 11);
  EXPECT_TRUE(csv.starts_with(
      "item_id,backend,mixture,position,correct,entropy,best_prob\n"));
  std::vector<PredictionRecord> shuffled = records;
  std::mt19937 rng(4);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  EXPECT_EQ(ViolinCsv(shuffled), csv);

  const std::string dir = testing::ScratchDir("violin");
  ASSERT_TRUE(ExportViolin(records, dir + "/a.csv").ok());
  ASSERT_TRUE(ExportViolin(shuffled, dir + "/b.csv").ok());
  EXPECT_EQ(*ReadFile(dir + "/a.csv"), *ReadFile(dir + "/b.csv"));
}

TEST(ViolinTest, RoundTripReproducesReports) {
  const std::vector<QaItem> items = testing::MakeItems(200);
  const auto records = SyntheticRecords(items, {0.0, 2.0, 0.5, 8});
  auto rows = ParseViolinCsv(ViolinCsv(records));
  ASSERT_TRUE(rows.ok()) << rows.status();
  ASSERT_EQ(rows->size(), records.size());

  // Rebuild just enough of each record to re-aggregate: the violin file
  // carries confidence and correctness but not the full distribution.
  std::vector<PredictionRecord> rebuilt;
  for (const ViolinRow& row : *rows) {
    PredictionRecord record;
    record.item_id = row.item_id;
    record.dataset = "generic";
    record.backend = {BackendKind::kSynthetic, row.backend};
    record.scenario.mixture = *ParseMixture(row.mixture);
    record.scenario.position = row.position == "none"
                                   ? Position::kPreQ
                                   : *ParsePosition(row.position);
    record.scenario.seed = 8;
    record.correct = row.correct;
    record.gold_index = row.correct ? 0 : 1;
    record.entropy = row.entropy;
    record.best_prob = row.best_prob;
    record.p = {row.best_prob, 1.0 - row.best_prob};
    rebuilt.push_back(std::move(record));
  }
  auto original = Aggregate(records);
  auto again = Aggregate(rebuilt);
  ASSERT_TRUE(original.ok() && again.ok());
  ASSERT_EQ(original->size(), again->size());
  for (size_t i = 0; i < original->size(); ++i) {
    const MetricReport& a = (*original)[i];
    const MetricReport& b = (*again)[i];
    EXPECT_TRUE(a.key == b.key);
    EXPECT_EQ(a.n_correct, b.n_correct);
    EXPECT_EQ(a.n_incorrect, b.n_incorrect);
    EXPECT_EQ(a.accuracy, b.accuracy);
    EXPECT_EQ(a.ece, b.ece);
    EXPECT_EQ(a.entropy_correct->mean, b.entropy_correct->mean);
    EXPECT_EQ(a.entropy_correct->stddev, b.entropy_correct->stddev);
    EXPECT_EQ(a.best_prob_incorrect.has_value(),
              b.best_prob_incorrect.has_value());
  }
}

TEST(ViolinTest, RejectsMalformedFiles) {
  EXPECT_FALSE(ParseViolinCsv("").ok());
  EXPECT_FALSE(ParseViolinCsv("a,b\n").ok());
  EXPECT_FALSE(ParseViolinCsv("item_id,backend,mixture,position,correct,"
                              "entropy,best_prob\nx,y,none,none,true,zz,0.5\n")
                   .ok());
}

TEST(CsvTest, QuotingRoundTrip) {
  const std::vector<std::string> fields = {"plain", "with,comma",
                                           "with \"quotes\"", "multi\nline", ""};
  std::string line;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) line += ",";
    line += CsvField(fields[i]);
  }
  line += "\n";
  auto parsed = ParseCsv(line);
  ASSERT_TRUE(parsed.ok());
  ASSERT_EQ(parsed->size(), 1u);
  EXPECT_EQ((*parsed)[0], fields);
  EXPECT_FALSE(ParseCsv("\"open").ok());
}

TEST(ConfusionTest, CountsOnlyErrors) {
  const std::vector<std::string> names = {"yes", "no", "maybe"};
  std::vector<PredictionRecord> records = {
      testing::OracleRecord(0, {0.2, 0.7, 0.1}, 0),  // yes -> no
      testing::OracleRecord(1, {0.2, 0.1, 0.7}, 0),  // yes -> maybe
      testing::OracleRecord(2, {0.8, 0.1, 0.1}, 0),  // correct
  };
  const ConfusionTable table = ErrorConfusion(records);
  EXPECT_EQ(table.total(), 2);
  EXPECT_EQ(table.rows.size(), 1u);
  EXPECT_EQ(table.rows.at(0).at(1), 1);
  EXPECT_EQ(table.rows.at(0).at(2), 1);
  EXPECT_EQ(ConfusionCsv(table, names),
            "gold,predicted,count\nyes,no,1\nyes,maybe,1\n");
  EXPECT_THAT(ConfusionMarkdown(table, names), HasSubstr("| yes "));

  records.pop_back();
  records.erase(records.begin(), records.end());
  records.push_back(testing::OracleRecord(3, {0.9, 0.1}, 0));
  EXPECT_EQ(ErrorConfusion(records).total(), 0);
  EXPECT_TRUE(ErrorConfusion(records).rows.empty());
}

// Always prefers the first label, whatever the item.
class AlwaysFirstBackend : public ScoringBackend {
 public:
  const BackendId& id() const override { return id_; }
  absl::StatusOr<std::vector<double>> ScoreOptions(
      const PromptInstance& prompt) const override {
    std::vector<double> v(prompt.labels.size(), -3.0);
    v[0] = 0.0;
    return v;
  }

 private:
  BackendId id_{BackendKind::kSynthetic, "always-a"};
};

TEST(ConfusionTest, ForcedBackendConcentratesOnFirstLabel) {
  const std::vector<QaItem> items = testing::MakeItems(80);
  const AlwaysFirstBackend backend;
  std::vector<PredictionRecord> records;
  int wrong = 0;
  for (const QaItem& item : items) {
    auto prompt = RenderPrompt(item, {}, ScenarioSpec{});
    ASSERT_TRUE(prompt.ok());
    auto v = ScoreOptions(backend, *prompt);
    ASSERT_TRUE(v.ok());
    auto record = MakeRecord(item, ScenarioSpec{}, backend.id(), *v);
    ASSERT_TRUE(record.ok());
    if (item.gold_index != 0) ++wrong;
    records.push_back(*std::move(record));
  }
  const ConfusionTable table = ErrorConfusion(records);
  EXPECT_EQ(table.total(), wrong);
  EXPECT_FALSE(table.rows.contains(0));
  for (const auto& [gold, predicted] : table.rows) {
    ASSERT_EQ(predicted.size(), 1u) << "gold " << gold;
    EXPECT_EQ(predicted.begin()->first, 0);
  }
}

TEST(ConfusionTest, CellsSumToErrorCount) {
  std::mt19937_64 rng(6);
  const auto records = testing::RandomRecords(rng, 300, 4);
  int errors = 0;
  for (const PredictionRecord& record : records) errors += !record.correct;
  EXPECT_EQ(ErrorConfusion(records).total(), errors);
}

}  // namespace
}  // namespace ragcal
