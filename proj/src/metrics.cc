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

#include "ragcal/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include "ragcal/text.h"

namespace ragcal {

absl::Status ValidateMetricConfig(const MetricConfig& config) {
  if (config.ece_bins < 1 || config.ace_bins < 1) {
    return absl::InvalidArgumentError(
        StrCat("bin counts must be >= 1 (ece_bins=", config.ece_bins,
                     ", ace_bins=", config.ace_bins, ")"));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<double>> Normalize(std::span<const double> v) {
  if (v.empty()) return absl::InvalidArgumentError("cannot normalize no scores");
  for (double value : v) {
    if (!std::isfinite(value)) {
      return absl::InvalidArgumentError(
          StrCat("non-finite score ", value));
    }
  }
  const double shift = *std::max_element(v.begin(), v.end());
  std::vector<double> p(v.size());
  double total = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    p[i] = std::exp(v[i] - shift);
    total += p[i];
  }
  // total >= 1 because the max term is exp(0).
  for (double& value : p) value /= total;
  return p;
}

absl::StatusOr<OptionScores> MakeOptionScores(std::vector<double> v) {
  auto p = Normalize(v);
  if (!p.ok()) return p.status();
  return OptionScores{std::move(v), *std::move(p)};
}

absl::Status ValidateDistribution(std::span<const double> p) {
  if (p.empty()) return absl::InvalidArgumentError("empty distribution");
  double total = 0.0;
  for (double value : p) {
    if (!(value >= 0.0 && value <= 1.0)) {
      return absl::InvalidArgumentError(
          StrCat("probability ", value, " outside [0, 1]"));
    }
    total += value;
  }
  if (std::abs(total - 1.0) > kDistributionTolerance) {
    return absl::InvalidArgumentError(
        StrCat("probabilities sum to ", total));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> Entropy(std::span<const double> p) {
  if (absl::Status status = ValidateDistribution(p); !status.ok()) {
    return status;
  }
  double entropy = 0.0;
  for (double value : p) {
    if (value > 0.0) entropy -= value * std::log(value);
  }
  // Rounding can leave a one-hot distribution at -0.0 or a hair below zero.
  return std::max(entropy, 0.0);
}

BestChoice BestProb(std::span<const double> p) {
  BestChoice best{0, p.empty() ? 0.0 : p[0]};
  for (size_t i = 1; i < p.size(); ++i) {
    if (p[i] > best.prob) best = {static_cast<int>(i), p[i]};
  }
  return best;
}

absl::StatusOr<PredictionRecord> MakeRecord(const QaItem& item,
                                            const ScenarioSpec& scenario,
                                            const BackendId& backend,
                                            std::vector<double> v) {
  if (static_cast<int>(v.size()) != item.num_options()) {
    return absl::InvalidArgumentError(
        StrCat("item \"", item.id, "\": got ", v.size(),
                     " scores for ", item.num_options(), " options"));
  }
  auto scores = MakeOptionScores(std::move(v));
  if (!scores.ok()) return scores.status();
  auto entropy = Entropy(scores->p);
  if (!entropy.ok()) return entropy.status();
  const BestChoice best = BestProb(scores->p);

  PredictionRecord record;
  record.item_id = item.id;
  record.dataset = item.dataset_tag;
  record.scenario = scenario.Canonical();
  record.backend = backend;
  record.chosen_index = best.index;
  record.gold_index = item.gold_index;
  record.correct = best.index == item.gold_index;
  record.entropy = *entropy;
  record.best_prob = best.prob;
  record.p = std::move(scores->p);
  record.v = std::move(scores->v);
  return record;
}

absl::StatusOr<double> Accuracy(std::span<const PredictionRecord> records) {
  if (records.empty()) {
    return absl::InvalidArgumentError("accuracy of an empty record set");
  }
  const auto correct = std::count_if(
      records.begin(), records.end(),
      [](const PredictionRecord& record) { return record.correct; });
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

namespace {

// Index of the half-open bin [m/M, (m+1)/M) holding `confidence`, the last
// bin closed on the right. The floor estimate is corrected against the exact
// bin edges so that edge values land where the interval definition says.
int EqualWidthBin(double confidence, int num_bins) {
  int bin = static_cast<int>(std::floor(confidence * num_bins));
  bin = std::clamp(bin, 0, num_bins - 1);
  const double m = static_cast<double>(num_bins);
  if (bin > 0 && confidence < bin / m) --bin;
  if (bin < num_bins - 1 && confidence >= (bin + 1) / m) ++bin;
  return bin;
}

}  // namespace

absl::StatusOr<std::vector<CalibrationBin>> ReliabilityBins(
    std::span<const PredictionRecord> records, int num_bins) {
  if (num_bins < 1) return absl::InvalidArgumentError("num_bins must be >= 1");
  if (records.empty()) {
    return absl::InvalidArgumentError("calibration of an empty record set");
  }
  std::vector<CalibrationBin> bins(num_bins);
  std::vector<double> confidence_sum(num_bins, 0.0);
  std::vector<int> correct_count(num_bins, 0);
  for (const PredictionRecord& record : records) {
    const int bin = EqualWidthBin(record.best_prob, num_bins);
    ++bins[bin].count;
    confidence_sum[bin] += record.best_prob;
    if (record.correct) ++correct_count[bin];
  }
  for (int m = 0; m < num_bins; ++m) {
    if (bins[m].count == 0) continue;
    bins[m].confidence = confidence_sum[m] / bins[m].count;
    bins[m].accuracy = static_cast<double>(correct_count[m]) / bins[m].count;
  }
  return bins;
}

absl::StatusOr<double> Ece(std::span<const PredictionRecord> records,
                           int num_bins) {
  auto bins = ReliabilityBins(records, num_bins);
  if (!bins.ok()) return bins.status();
  const double n = static_cast<double>(records.size());
  double ece = 0.0;
  for (const CalibrationBin& bin : *bins) {
    if (bin.count == 0) continue;
    ece += (bin.count / n) * std::abs(bin.accuracy - bin.confidence);
  }
  return ece;
}

absl::StatusOr<double> Ace(std::span<const PredictionRecord> records,
                           int num_bins) {
  if (num_bins < 1) return absl::InvalidArgumentError("num_bins must be >= 1");
  if (records.empty()) {
    return absl::InvalidArgumentError("calibration of an empty record set");
  }
  const int num_classes = records.front().num_classes();
  for (const PredictionRecord& record : records) {
    if (record.num_classes() != num_classes) {
      return absl::InvalidArgumentError(StrCat(
          "mixed class counts: ", num_classes, " vs ", record.num_classes(),
          " (item \"", record.item_id, "\")"));
    }
  }
  const int n = static_cast<int>(records.size());
  if (num_bins > n) {
    std::fprintf(stderr,
                 "warning: ACE bin count %d exceeds %d records; using %d\n",
                 num_bins, n, n);
    num_bins = n;
  }
  const int base_size = n / num_bins;
  const int larger_bins = n % num_bins;

  std::vector<int> order(n);
  double total_gap = 0.0;
  for (int k = 0; k < num_classes; ++k) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return records[a].p[k] < records[b].p[k];
    });
    int begin = 0;
    for (int r = 0; r < num_bins; ++r) {
      const int size = base_size + (r < larger_bins ? 1 : 0);
      double confidence = 0.0;
      int hits = 0;
      for (int i = begin; i < begin + size; ++i) {
        const PredictionRecord& record = records[order[i]];
        confidence += record.p[k];
        if (record.gold_index == k) ++hits;
      }
      total_gap += std::abs(static_cast<double>(hits) / size -
                            confidence / size);
      begin += size;
    }
  }
  return total_gap / (static_cast<double>(num_classes) * num_bins);
}

}  // namespace ragcal
