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

#include "ragcal/runner.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <thread>

#include "nlohmann/json.hpp"
#include "ragcal/cache.h"
#include "ragcal/text.h"

namespace ragcal {
namespace fs = std::filesystem;

absl::Status ValidateRunConfig(const RunConfig& config) {
  if (config.mixtures.empty()) {
    return absl::InvalidArgumentError("at least one mixture is required");
  }
  if (config.positions.empty()) {
    return absl::InvalidArgumentError("at least one position is required");
  }
  if (config.concurrency < 1) {
    return absl::InvalidArgumentError("concurrency must be >= 1");
  }
  if (config.out_dir.empty()) {
    return absl::InvalidArgumentError("an output directory is required");
  }
  if (config.cache_dir.empty()) {
    return absl::InvalidArgumentError("a cache directory is required");
  }
  if (absl::Status status = ValidateMetricConfig(config.metrics); !status.ok()) {
    return status;
  }
  if (config.backend == BackendKind::kSynthetic) {
    return ValidateSyntheticConfig(config.synthetic);
  }
  if (config.remote.endpoint.empty()) {
    return absl::InvalidArgumentError("the remote backend needs --endpoint");
  }
  return absl::OkStatus();
}

std::vector<GridCell> ExpandGrid(size_t num_items,
                                 const std::vector<Mixture>& mixtures,
                                 const std::vector<Position>& positions,
                                 uint64_t seed) {
  const bool with_baseline =
      std::find(mixtures.begin(), mixtures.end(), Mixture::kNone) !=
      mixtures.end();
  std::vector<GridCell> cells;
  cells.reserve(ExpectedRecordCount(num_items, mixtures, positions));
  for (size_t i = 0; i < num_items; ++i) {
    if (with_baseline) {
      cells.push_back({i, ScenarioSpec{Mixture::kNone, Position::kPreQ, seed}});
    }
    for (Mixture mixture : mixtures) {
      if (mixture == Mixture::kNone) continue;
      for (Position position : positions) {
        cells.push_back({i, ScenarioSpec{mixture, position, seed}});
      }
    }
  }
  return cells;
}

size_t ExpectedRecordCount(size_t num_items,
                           const std::vector<Mixture>& mixtures,
                           const std::vector<Position>& positions) {
  // Duplicates in the inputs are counted as given.
  size_t per_item = 0;
  bool with_baseline = false;
  for (Mixture mixture : mixtures) {
    if (mixture == Mixture::kNone) {
      with_baseline = true;
    } else {
      per_item += positions.size();
    }
  }
  return num_items * (per_item + (with_baseline ? 1 : 0));
}

absl::StatusOr<std::unique_ptr<ScoringBackend>> MakeBackend(
    const RunConfig& config, const std::vector<QaItem>& items) {
  if (config.backend == BackendKind::kSynthetic) {
    if (absl::Status status = ValidateSyntheticConfig(config.synthetic);
        !status.ok()) {
      return status;
    }
    return std::make_unique<SyntheticBackend>(config.synthetic, items);
  }
  RemoteConfig remote = config.remote;
  remote.max_in_flight = config.concurrency;
  return std::make_unique<RemoteBackend>(std::move(remote));
}

absl::StatusOr<RunResult> RunGrid(const RunConfig& config,
                                  const ScoringBackend& backend,
                                  const std::vector<QaItem>& items) {
  if (absl::Status status = ValidateRunConfig(config); !status.ok()) {
    return status;
  }
  if (!config.resume && fs::exists(fs::path(config.out_dir) / "manifest.json")) {
    return absl::FailedPreconditionError(
        StrCat("\"", config.out_dir,
                     "\" already holds a run; pass --resume to continue it"));
  }

  // Documents depend on (item, mixture) only, so every position of a mixture
  // sees the same documents.
  std::map<std::pair<size_t, Mixture>, std::vector<ContextDoc>> contexts;
  for (size_t i = 0; i < items.size(); ++i) {
    for (Mixture mixture : config.mixtures) {
      if (contexts.contains({i, mixture})) continue;
      auto docs = BuildContext(items[i], mixture, items, config.seed,
                               config.context);
      if (!docs.ok()) return docs.status();
      contexts.emplace(std::make_pair(i, mixture), *std::move(docs));
    }
  }

  const std::vector<GridCell> cells =
      ExpandGrid(items.size(), config.mixtures, config.positions, config.seed);
  std::vector<PromptInstance> prompts;
  prompts.reserve(cells.size());
  for (const GridCell& cell : cells) {
    auto prompt =
        RenderPrompt(items[cell.item_index],
                     contexts.at({cell.item_index, cell.scenario.mixture}),
                     cell.scenario, config.prompt_template);
    if (!prompt.ok()) return prompt.status();
    prompts.push_back(*std::move(prompt));
  }

  auto cache = ScoreCache::Open(config.cache_dir, backend.id().name);
  if (!cache.ok()) return cache.status();
  if ((*cache)->skipped_lines() > 0) {
    std::fprintf(stderr, "warning: skipped %d unreadable lines in %s\n",
                 (*cache)->skipped_lines(), (*cache)->path().c_str());
  }

  std::vector<std::optional<PredictionRecord>> slots(cells.size());
  std::vector<std::string> errors(cells.size());
  std::atomic<size_t> next_cell{0};
  std::atomic<int64_t> backend_calls{0};
  std::atomic<int64_t> cache_hits{0};

  auto worker = [&]() {
    for (size_t c = next_cell.fetch_add(1); c < cells.size();
         c = next_cell.fetch_add(1)) {
      const PromptInstance& prompt = prompts[c];
      const QaItem& item = items[cells[c].item_index];
      const std::string key =
          CacheKey(backend.id().name, prompt.text, prompt.labels);
      std::optional<std::vector<double>> scores = (*cache)->Lookup(key);
      if (scores.has_value() && scores->size() != prompt.labels.size()) {
        scores.reset();
      }
      if (scores.has_value()) {
        ++cache_hits;
      } else {
        ++backend_calls;
        auto fresh = ScoreOptions(backend, prompt);
        if (!fresh.ok()) {
          errors[c] = std::string(fresh.status().message());
          continue;
        }
        if (absl::Status status = (*cache)->Append(key, *fresh); !status.ok()) {
          errors[c] = std::string(status.message());
          continue;
        }
        scores = *std::move(fresh);
      }
      auto record =
          MakeRecord(item, cells[c].scenario, backend.id(), *std::move(scores));
      if (!record.ok()) {
        errors[c] = std::string(record.status().message());
        continue;
      }
      slots[c] = *std::move(record);
    }
  };

  const int num_workers =
      static_cast<int>(std::min<size_t>(config.concurrency, cells.size()));
  std::vector<std::thread> threads;
  for (int t = 1; t < num_workers; ++t) threads.emplace_back(worker);
  worker();
  for (std::thread& thread : threads) thread.join();

  RunResult result;
  result.num_cells = cells.size();
  result.backend_calls = backend_calls.load();
  result.cache_hits = cache_hits.load();
  for (size_t c = 0; c < cells.size(); ++c) {
    if (slots[c].has_value()) {
      result.records.push_back(*std::move(slots[c]));
    } else {
      result.failures.push_back(
          {items[cells[c].item_index].id, cells[c].scenario, errors[c]});
    }
  }
  result.records = SortedForExport(std::move(result.records));
  if (result.complete() && !result.records.empty()) {
    auto reports = Aggregate(result.records, config.metrics);
    if (!reports.ok()) return reports.status();
    result.reports = *std::move(reports);
  }
  return result;
}

absl::StatusOr<RunResult> RunGrid(const RunConfig& config) {
  if (absl::Status status = ValidateRunConfig(config); !status.ok()) {
    return status;
  }
  auto items = LoadDataset(config.dataset_path, config.format);
  if (!items.ok()) return items.status();
  std::vector<QaItem> selected = *std::move(items);
  if (config.require_rationale) {
    const size_t before = selected.size();
    selected = FilterWithRationale(selected);
    if (selected.size() != before) {
      std::fprintf(stderr, "note: kept %zu of %zu items with rationales\n",
                   selected.size(), before);
    }
  }
  auto backend = MakeBackend(config, selected);
  if (!backend.ok()) return backend.status();
  return RunGrid(config, **backend, selected);
}

absl::Status WriteReportFiles(const std::vector<PredictionRecord>& records,
                              const MetricConfig& metrics,
                              const std::string& out_dir) {
  auto reports = Aggregate(records, metrics);
  if (!reports.ok()) return reports.status();
  const fs::path dir(out_dir);
  if (absl::Status status =
          WriteFileAtomically((dir / "report.csv").string(), ReportCsv(*reports));
      !status.ok()) {
    return status;
  }
  return WriteFileAtomically((dir / "report.md").string(),
                             ReportMarkdown(*reports));
}

absl::Status WriteRunOutputs(const RunConfig& config, const RunResult& result) {
  const fs::path dir(config.out_dir);
  std::error_code error;
  fs::create_directories(dir, error);
  if (error) {
    return absl::UnavailableError(StrCat(
        "cannot create output directory \"", config.out_dir,
        "\": ", error.message()));
  }
  if (absl::Status status =
          WriteRecords(result.records, (dir / "records.jsonl").string());
      !status.ok()) {
    return status;
  }
  if (result.complete()) {
    if (!result.reports.empty()) {
      if (absl::Status status = WriteFileAtomically(
              (dir / "report.csv").string(), ReportCsv(result.reports));
          !status.ok()) {
        return status;
      }
      if (absl::Status status = WriteFileAtomically(
              (dir / "report.md").string(), ReportMarkdown(result.reports));
          !status.ok()) {
        return status;
      }
    }
    if (absl::Status status =
            ExportViolin(result.records, (dir / "violin.csv").string());
        !status.ok()) {
      return status;
    }
  }

  nlohmann::json failed = nlohmann::json::array();
  for (const FailedCell& cell : result.failures) {
    failed.push_back({{"item_id", cell.item_id},
                      {"mixture", MixtureName(cell.scenario.mixture)},
                      {"position", cell.scenario.position_tag()},
                      {"error", cell.error}});
  }
  const nlohmann::json manifest = {
      {"status", result.complete() ? "complete" : "partial"},
      {"cells", result.num_cells},
      {"records", result.records.size()},
      {"backend_calls", result.backend_calls},
      {"cache_hits", result.cache_hits},
      {"seed", config.seed},
      {"failed", failed},
  };
  return WriteFileAtomically((dir / "manifest.json").string(),
                             manifest.dump(2) + "\n");
}

}  // namespace ragcal
