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

// Aggregation of prediction records into per-scenario reports, plus the
// violin-plot and error-confusion exports.

#ifndef RAGCAL_REPORT_H_
#define RAGCAL_REPORT_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ragcal/metrics.h"
#include "ragcal/records.h"

namespace ragcal {

struct GroupKey {
  std::string backend;
  std::string dataset;
  Mixture mixture = Mixture::kNone;
  // Canonical (pre-q) for the baseline.
  Position position = Position::kPreQ;

  static GroupKey Of(const PredictionRecord& record);
  std::string_view position_tag() const;

  friend auto operator<=>(const GroupKey&, const GroupKey&) = default;
};

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

// Population mean and standard deviation; nullopt for an empty sample.
std::optional<MeanStd> ComputeMeanStd(const std::vector<double>& values);

struct MetricReport {
  GroupKey key;
  int n_correct = 0;
  int n_incorrect = 0;
  // Absent when the correctness class has no records.
  std::optional<MeanStd> entropy_correct;
  std::optional<MeanStd> best_prob_correct;
  std::optional<MeanStd> entropy_incorrect;
  std::optional<MeanStd> best_prob_incorrect;
  double accuracy = 0.0;
  double ece = 0.0;
  double ace = 0.0;
  // Signed differences against the same backend/dataset baseline group.
  // Present only when that baseline group exists.
  std::optional<double> delta_accuracy;
  std::optional<double> delta_ace;

  int total() const { return n_correct + n_incorrect; }
};

// One report per (backend, dataset, mixture, position) group, sorted by
// group. Records inside a group are processed in item_id order, so the
// result does not depend on input order.
absl::StatusOr<std::vector<MetricReport>> Aggregate(
    const std::vector<PredictionRecord>& records,
    const MetricConfig& config = {});

// RFC-4180 CSV (LF line endings). Absent values render as "--".
std::string ReportCsv(const std::vector<MetricReport>& reports);
// Aligned Markdown table with mean±std cells and "--" for absent values.
std::string ReportMarkdown(const std::vector<MetricReport>& reports);

// Records sorted by group then item_id; the violin export order.
std::vector<PredictionRecord> SortedForExport(
    std::vector<PredictionRecord> records);

// Long-format CSV: item_id,backend,mixture,position,correct,entropy,best_prob.
std::string ViolinCsv(const std::vector<PredictionRecord>& records);
absl::Status ExportViolin(const std::vector<PredictionRecord>& records,
                          const std::string& path);

struct ViolinRow {
  std::string item_id;
  std::string backend;
  std::string mixture;
  std::string position;
  bool correct = false;
  double entropy = 0.0;
  double best_prob = 0.0;
};
absl::StatusOr<std::vector<ViolinRow>> ParseViolinCsv(std::string_view csv);

// Error analysis: among incorrect records, predicted-class counts per gold
// class. Rows exist only for gold classes with at least one error.
struct ConfusionTable {
  int num_classes = 0;
  std::map<int, std::map<int, int>> rows;  // gold -> predicted -> count

  int total() const;
};

ConfusionTable ErrorConfusion(const std::vector<PredictionRecord>& records);

// `class_names` defaults to letters A, B, ... when empty.
std::string ConfusionCsv(const ConfusionTable& table,
                         const std::vector<std::string>& class_names = {});
std::string ConfusionMarkdown(const ConfusionTable& table,
                              const std::vector<std::string>& class_names = {});

// Minimal RFC-4180 helpers.
std::string CsvField(std::string_view field);
absl::StatusOr<std::vector<std::vector<std::string>>> ParseCsv(
    std::string_view csv);

}  // namespace ragcal

#endif  // RAGCAL_REPORT_H_
