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

// Scoring backends: anything that returns one raw log-score per answer label.
//
// Scores are unnormalized; the softmax lives in metrics. Backends are shared
// across worker threads, so ScoreOptions must be safe to call concurrently.

#ifndef RAGCAL_BACKENDS_H_
#define RAGCAL_BACKENDS_H_

#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "absl/status/statusor.h"
#include "ragcal/dataset.h"
#include "ragcal/prompt.h"
#include "ragcal/records.h"

namespace ragcal {

class ScoringBackend {
 public:
  virtual ~ScoringBackend() = default;

  virtual const BackendId& id() const = 0;

  // One score per prompt label, in label order. Larger means preferred.
  virtual absl::StatusOr<std::vector<double>> ScoreOptions(
      const PromptInstance& prompt) const = 0;
};

// Calls backend.ScoreOptions and checks the result: one finite value per
// label.
absl::StatusOr<std::vector<double>> ScoreOptions(const ScoringBackend& backend,
                                                 const PromptInstance& prompt);

// ---------------------------------------------------------------------------
// Synthetic backend.
//
// A toy "model" with three knobs: a fixed logit boost on the gold label
// (base_knowledge), an extra gold boost whenever the prompt carries the
// answer-bearing document (relevance_sensitivity), and seeded Gaussian logit
// noise on every label (noise_stddev). The noise for a label is addressed by
// (seed, item id, document position, label index), so it is identical across
// mixtures at a fixed position and setting relevance_sensitivity to zero makes
// the model insensitive to documents.

struct SyntheticConfig {
  double base_knowledge = 0.0;
  double relevance_sensitivity = 0.0;
  double noise_stddev = 0.0;
  uint64_t seed = 0;
};

absl::Status ValidateSyntheticConfig(const SyntheticConfig& config);

std::vector<double> SynthScore(const SyntheticConfig& config,
                               const QaItem& item,
                               const ScenarioSpec& scenario,
                               bool answer_doc_present);

class SyntheticBackend : public ScoringBackend {
 public:
  // `items` is the item table the backend consults for gold answers; prompts
  // for unknown item ids are rejected.
  SyntheticBackend(SyntheticConfig config, const std::vector<QaItem>& items);

  const BackendId& id() const override { return id_; }
  const SyntheticConfig& config() const { return config_; }

  absl::StatusOr<std::vector<double>> ScoreOptions(
      const PromptInstance& prompt) const override;

 private:
  SyntheticConfig config_;
  BackendId id_;
  std::unordered_map<std::string, QaItem> items_;
};

// Stable name for a synthetic configuration, e.g. "synthetic-1a2b3c4d5e6f7a8b".
std::string SyntheticBackendName(const SyntheticConfig& config);

// ---------------------------------------------------------------------------
// Remote backend speaking the label-logprob protocol:
//
//   POST <endpoint>/v1/label_logprobs
//   {"prompt": str, "labels": [str]}
//   -> 200 {"model": str, "logprobs": [float]}   (aligned with labels)
//   -> 4xx {"error": str}

struct HttpOptions {
  double timeout_seconds = 120.0;
  int max_retries = 3;
  int initial_backoff_ms = 500;
  // Sent as "Authorization: Bearer <token>" when non-empty.
  std::string auth_token;
};

// Environment variable read for the bearer token.
inline constexpr char kAuthTokenEnv[] = "RAGCAL_API_TOKEN";

inline constexpr char kLabelLogprobsPath[] = "/v1/label_logprobs";

// One protocol round trip with retries on transport errors and 5xx. 4xx
// responses fail immediately.
absl::StatusOr<std::vector<double>> HttpScore(
    const std::string& endpoint, const std::string& prompt_text,
    const std::vector<std::string>& labels, const HttpOptions& options = {});

// Validates a protocol response body against `labels`.
absl::StatusOr<std::vector<double>> ParseLabelLogprobsResponse(
    const std::string& body, const std::vector<std::string>& labels);

struct RemoteConfig {
  std::string endpoint;  // e.g. "http://127.0.0.1:8000"
  // Cache/report name; defaults to "remote:<endpoint>".
  std::string model_name;
  int max_in_flight = 4;
  HttpOptions http;
};

class RemoteBackend : public ScoringBackend {
 public:
  explicit RemoteBackend(RemoteConfig config);

  const BackendId& id() const override { return id_; }

  absl::StatusOr<std::vector<double>> ScoreOptions(
      const PromptInstance& prompt) const override;

 private:
  RemoteConfig config_;
  BackendId id_;
  mutable std::mutex mutex_;
  mutable std::condition_variable slot_free_;
  mutable int in_flight_ = 0;
};

}  // namespace ragcal

#endif  // RAGCAL_BACKENDS_H_
