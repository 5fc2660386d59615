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

// Forced-choice probability and calibration metrics.
//
// All logarithms are natural, so entropies are in nats and the entropy of a
// uniform J-way distribution is ln J.

#ifndef RAGCAL_METRICS_H_
#define RAGCAL_METRICS_H_

#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ragcal/dataset.h"
#include "ragcal/records.h"

namespace ragcal {

// Tolerance on |sum(p) - 1| for a vector to count as a distribution.
inline constexpr double kDistributionTolerance = 1e-9;

struct MetricConfig {
  int ece_bins = 10;
  int ace_bins = 10;
};

absl::Status ValidateMetricConfig(const MetricConfig& config);

struct OptionScores {
  std::vector<double> v;  // raw log-scores
  std::vector<double> p;  // softmax of v
};

struct BestChoice {
  int index = 0;
  double prob = 0.0;
};

struct CalibrationBin {
  int count = 0;
  double confidence = 0.0;  // mean confidence, 0 when empty
  double accuracy = 0.0;    // 0 when empty
};

// Softmax with max-shift. Fails on empty or non-finite input.
absl::StatusOr<std::vector<double>> Normalize(std::span<const double> v);
absl::StatusOr<OptionScores> MakeOptionScores(std::vector<double> v);

// -sum p ln p with 0 ln 0 = 0. Fails unless `p` is a distribution.
absl::StatusOr<double> Entropy(std::span<const double> p);

// Arg-max with lowest-index tie-break. `p` must be non-empty.
BestChoice BestProb(std::span<const double> p);

absl::Status ValidateDistribution(std::span<const double> p);

// Builds the record for one scored prompt. `v` is in label order, which is
// also option order.
absl::StatusOr<PredictionRecord> MakeRecord(const QaItem& item,
                                            const ScenarioSpec& scenario,
                                            const BackendId& backend,
                                            std::vector<double> v);

absl::StatusOr<double> Accuracy(std::span<const PredictionRecord> records);

// Equal-width reliability bins over best_prob: bin m covers [m/M, (m+1)/M),
// the last bin also includes 1.
absl::StatusOr<std::vector<CalibrationBin>> ReliabilityBins(
    std::span<const PredictionRecord> records, int num_bins);

// Expected calibration error over best_prob with `num_bins` equal-width bins.
absl::StatusOr<double> Ece(std::span<const PredictionRecord> records,
                           int num_bins);

// Adaptive calibration error: for every class k, records sorted by p[k]
// (stable) are cut into `num_bins` contiguous bins whose sizes differ by at
// most one, the larger bins first. If num_bins exceeds the record count it is
// clamped to the record count and a warning is printed. Every record must
// carry the same number of classes.
absl::StatusOr<double> Ace(std::span<const PredictionRecord> records,
                           int num_bins);

}  // namespace ragcal

#endif  // RAGCAL_METRICS_H_
