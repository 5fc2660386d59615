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

// Experiment grid: items x mixtures x positions, scored through a cache.
//
// The baseline mixture is evaluated once per item regardless of how many
// positions are requested, so a full grid yields 10 records per item.
// Output directory layout after a run:
//
//   records.jsonl   every PredictionRecord, export order
//   report.csv      MetricReports (complete runs only)
//   report.md
//   violin.csv
//   manifest.json   status, counts and the list of failed cells

#ifndef RAGCAL_RUNNER_H_
#define RAGCAL_RUNNER_H_

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ragcal/backends.h"
#include "ragcal/contextgen.h"
#include "ragcal/dataset.h"
#include "ragcal/metrics.h"
#include "ragcal/prompt.h"
#include "ragcal/report.h"

namespace ragcal {

// Process exit codes of `ragcal run`.
inline constexpr int kExitComplete = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitPartial = 3;

struct RunConfig {
  std::string dataset_path;
  DatasetFormat format = DatasetFormat::kGeneric;
  // Keep only items that carry a rationale; distractors are drawn from them.
  bool require_rationale = true;

  BackendKind backend = BackendKind::kSynthetic;
  SyntheticConfig synthetic;
  RemoteConfig remote;

  std::vector<Mixture> mixtures = {std::begin(kAllMixtures),
                                   std::end(kAllMixtures)};
  std::vector<Position> positions = {std::begin(kAllPositions),
                                     std::end(kAllPositions)};
  uint64_t seed = 0;
  MetricConfig metrics;
  ContextOptions context;
  PromptTemplate prompt_template;

  std::string cache_dir = "cache";
  std::string out_dir = "out";
  int concurrency = 4;
  // Allow writing into an output directory that already holds a run.
  bool resume = false;
};

absl::Status ValidateRunConfig(const RunConfig& config);

struct GridCell {
  size_t item_index = 0;
  ScenarioSpec scenario;
};

// Cells in deterministic order: per item, the baseline first (if requested),
// then mixtures x positions in the order given.
std::vector<GridCell> ExpandGrid(size_t num_items,
                                 const std::vector<Mixture>& mixtures,
                                 const std::vector<Position>& positions,
                                 uint64_t seed);

// |items| x (|mixtures \ {none}| x |positions| + [none in mixtures]).
size_t ExpectedRecordCount(size_t num_items,
                           const std::vector<Mixture>& mixtures,
                           const std::vector<Position>& positions);

struct FailedCell {
  std::string item_id;
  ScenarioSpec scenario;
  std::string error;
};

struct RunResult {
  std::vector<PredictionRecord> records;  // export order
  std::vector<MetricReport> reports;      // empty unless complete
  std::vector<FailedCell> failures;
  size_t num_cells = 0;
  int64_t backend_calls = 0;
  int64_t cache_hits = 0;

  bool complete() const { return failures.empty(); }
};

// Scores every cell of the grid over `items` with `backend`. Scores are read
// from and appended to the cache in config.cache_dir. Scoring failures are
// collected per cell; configuration and context errors fail the call.
absl::StatusOr<RunResult> RunGrid(const RunConfig& config,
                                  const ScoringBackend& backend,
                                  const std::vector<QaItem>& items);

// Loads the dataset and builds the backend named by the config, then runs.
absl::StatusOr<RunResult> RunGrid(const RunConfig& config);

// Writes records, reports, violin data and the manifest to config.out_dir.
absl::Status WriteRunOutputs(const RunConfig& config, const RunResult& result);

// Recomputes and writes report.csv / report.md from a records file.
absl::Status WriteReportFiles(const std::vector<PredictionRecord>& records,
                              const MetricConfig& metrics,
                              const std::string& out_dir);

// Builds the backend described by `config` for `items`.
absl::StatusOr<std::unique_ptr<ScoringBackend>> MakeBackend(
    const RunConfig& config, const std::vector<QaItem>& items);

}  // namespace ragcal

#endif  // RAGCAL_RUNNER_H_
