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

#include "ragcal/backends.h"

#include <chrono>
#include <cmath>
#include <cstring>
#include <thread>

#include "fmt/format.h"
#include "httplib.h"
#include "nlohmann/json.hpp"
#include "ragcal/hashing.h"
#include "ragcal/text.h"

namespace ragcal {

using json = nlohmann::json;

absl::StatusOr<std::vector<double>> ScoreOptions(const ScoringBackend& backend,
                                                 const PromptInstance& prompt) {
  auto scores = backend.ScoreOptions(prompt);
  if (!scores.ok()) return scores.status();
  if (scores->size() != prompt.labels.size()) {
    return absl::InternalError(StrCat(
        backend.id().name, " returned ", scores->size(), " scores for ",
        prompt.labels.size(), " labels"));
  }
  for (size_t i = 0; i < scores->size(); ++i) {
    if (!std::isfinite((*scores)[i])) {
      return absl::DataLossError(
          StrCat(backend.id().name, " returned non-finite score ",
                       (*scores)[i], " for label ", prompt.labels[i]));
    }
  }
  return scores;
}

// ---------------------------------------------------------------------------
// Synthetic.

absl::Status ValidateSyntheticConfig(const SyntheticConfig& config) {
  if (!(config.noise_stddev >= 0.0) || !std::isfinite(config.noise_stddev)) {
    return absl::InvalidArgumentError("synthetic noise must be finite and >= 0");
  }
  if (!std::isfinite(config.base_knowledge) ||
      !std::isfinite(config.relevance_sensitivity)) {
    return absl::InvalidArgumentError("synthetic logit boosts must be finite");
  }
  return absl::OkStatus();
}

std::vector<double> SynthScore(const SyntheticConfig& config,
                               const QaItem& item,
                               const ScenarioSpec& scenario,
                               bool answer_doc_present) {
  const ScenarioSpec canonical = scenario.Canonical();
  const uint64_t item_key =
      MixSeeds(MixSeeds(config.seed, Fnv1a64(item.id)),
               static_cast<uint64_t>(canonical.position));
  std::vector<double> v(item.num_options(), 0.0);
  for (int i = 0; i < item.num_options(); ++i) {
    if (config.noise_stddev > 0.0) {
      v[i] = config.noise_stddev *
             CounterGaussian(MixSeeds(item_key, static_cast<uint64_t>(i)));
    }
  }
  v[item.gold_index] += config.base_knowledge +
                        (answer_doc_present ? config.relevance_sensitivity : 0.0);
  return v;
}

std::string SyntheticBackendName(const SyntheticConfig& config) {
  const std::string canonical =
      fmt::format("b={:.17g};lambda={:.17g};sigma={:.17g};seed={}",
                      config.base_knowledge, config.relevance_sensitivity,
                      config.noise_stddev, config.seed);
  return fmt::format("synthetic-{:016x}", Fnv1a64(canonical));
}

SyntheticBackend::SyntheticBackend(SyntheticConfig config,
                                   const std::vector<QaItem>& items)
    : config_(config),
      id_{BackendKind::kSynthetic, SyntheticBackendName(config)} {
  for (const QaItem& item : items) items_.emplace(item.id, item);
}

absl::StatusOr<std::vector<double>> SyntheticBackend::ScoreOptions(
    const PromptInstance& prompt) const {
  auto it = items_.find(prompt.item_id);
  if (it == items_.end()) {
    return absl::NotFoundError(
        StrCat(id_.name, ": unknown item \"", prompt.item_id, "\""));
  }
  const QaItem& item = it->second;
  if (static_cast<int>(prompt.labels.size()) != item.num_options()) {
    return absl::InvalidArgumentError(
        StrCat(id_.name, ": prompt for \"", item.id, "\" has ",
                     prompt.labels.size(), " labels, item has ",
                     item.num_options(), " options"));
  }
  // Scores come back in label order; map through the relabeling so a
  // permuted label table still puts the boost on the gold option's label.
  const std::vector<double> by_option =
      SynthScore(config_, item, prompt.scenario,
                 HasAnswerDocument(prompt.scenario.mixture));
  std::vector<double> by_label(prompt.labels.size());
  for (size_t i = 0; i < prompt.labels.size(); ++i) {
    auto option = prompt.label_to_option.find(prompt.labels[i]);
    if (option == prompt.label_to_option.end()) {
      return absl::InvalidArgumentError(
          StrCat("label ", prompt.labels[i], " has no option"));
    }
    by_label[i] = by_option[option->second];
  }
  return by_label;
}

// ---------------------------------------------------------------------------
// Remote.

namespace {

struct ParsedEndpoint {
  std::string scheme_host_port;
  std::string base_path;
};

absl::StatusOr<ParsedEndpoint> ParseEndpoint(const std::string& endpoint) {
  if (!endpoint.starts_with("http://")) {
    return absl::InvalidArgumentError(StrCat(
        "endpoint \"", endpoint, "\" must start with http://"));
  }
  const size_t path_start = endpoint.find('/', std::strlen("http://"));
  ParsedEndpoint parsed;
  parsed.scheme_host_port = endpoint.substr(0, path_start);
  if (path_start != std::string::npos) {
    parsed.base_path = endpoint.substr(path_start);
    while (!parsed.base_path.empty() && parsed.base_path.back() == '/') {
      parsed.base_path.pop_back();
    }
  }
  if (parsed.scheme_host_port.size() <= std::strlen("http://")) {
    return absl::InvalidArgumentError(
        StrCat("endpoint \"", endpoint, "\" has no host"));
  }
  return parsed;
}

std::string ErrorMessageFromBody(const std::string& body) {
  const json parsed = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_object() && parsed.contains("error") &&
      parsed["error"].is_string()) {
    return parsed["error"].get<std::string>();
  }
  return body.substr(0, 200);
}

}  // namespace

absl::StatusOr<std::vector<double>> ParseLabelLogprobsResponse(
    const std::string& body, const std::vector<std::string>& labels) {
  const json parsed = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded() || !parsed.is_object()) {
    return absl::DataLossError("schema violation: response is not a JSON object");
  }
  auto model = parsed.find("model");
  if (model == parsed.end() || !model->is_string()) {
    return absl::DataLossError(
        "schema violation: response lacks string field \"model\"");
  }
  auto logprobs = parsed.find("logprobs");
  if (logprobs == parsed.end() || !logprobs->is_array()) {
    return absl::DataLossError(
        "schema violation: response lacks array field \"logprobs\"");
  }
  std::vector<double> values;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (i >= logprobs->size() || !(*logprobs)[i].is_number()) {
      return absl::DataLossError(StrCat(
          "schema violation: no logprob for label \"", labels[i], "\""));
    }
    const double value = (*logprobs)[i].get<double>();
    if (!std::isfinite(value)) {
      return absl::DataLossError(StrCat(
          "non-finite logprob for label \"", labels[i], "\""));
    }
    values.push_back(value);
  }
  if (logprobs->size() != labels.size()) {
    return absl::DataLossError(
        StrCat("schema violation: ", logprobs->size(),
                     " logprobs for ", labels.size(), " labels"));
  }
  return values;
}

absl::StatusOr<std::vector<double>> HttpScore(
    const std::string& endpoint, const std::string& prompt_text,
    const std::vector<std::string>& labels, const HttpOptions& options) {
  auto parsed = ParseEndpoint(endpoint);
  if (!parsed.ok()) return parsed.status();
  const std::string path = parsed->base_path + kLabelLogprobsPath;
  const std::string body = json{{"prompt", prompt_text}, {"labels", labels}}
                               .dump();

  const auto timeout = std::chrono::duration<double>(options.timeout_seconds);
  const auto timeout_us =
      std::chrono::duration_cast<std::chrono::microseconds>(timeout);
  httplib::Headers headers;
  if (!options.auth_token.empty()) {
    headers.emplace("Authorization", "Bearer " + options.auth_token);
  }

  absl::Status last_error;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(
          static_cast<int64_t>(options.initial_backoff_ms) << (attempt - 1)));
    }
    httplib::Client client(parsed->scheme_host_port);
    client.set_connection_timeout(
        std::chrono::duration_cast<std::chrono::seconds>(timeout_us).count(),
        timeout_us.count() % 1000000);
    client.set_read_timeout(
        std::chrono::duration_cast<std::chrono::seconds>(timeout_us).count(),
        timeout_us.count() % 1000000);
    client.set_write_timeout(
        std::chrono::duration_cast<std::chrono::seconds>(timeout_us).count(),
        timeout_us.count() % 1000000);

    const httplib::Result result =
        client.Post(path, headers, body, "application/json");
    if (!result) {
      last_error = absl::UnavailableError(
          StrCat(endpoint, ": transport error: ",
                       httplib::to_string(result.error())));
      continue;
    }
    if (result->status >= 500) {
      last_error = absl::UnavailableError(
          StrCat(endpoint, ": HTTP ", result->status, ": ",
                       ErrorMessageFromBody(result->body)));
      continue;
    }
    if (result->status != 200) {
      return absl::InvalidArgumentError(
          StrCat(endpoint, ": HTTP ", result->status, ": ",
                       ErrorMessageFromBody(result->body)));
    }
    auto values = ParseLabelLogprobsResponse(result->body, labels);
    if (!values.ok()) {
      return absl::Status(values.status().code(),
                          StrCat(endpoint, ": ", values.status().message()));
    }
    return values;
  }
  return absl::Status(
      last_error.code(),
      StrCat(last_error.message(), " (after ", options.max_retries + 1,
                   " attempts)"));
}

RemoteBackend::RemoteBackend(RemoteConfig config)
    : config_(std::move(config)),
      id_{BackendKind::kRemote,
          config_.model_name.empty() ? StrCat("remote:", config_.endpoint)
                                     : config_.model_name} {
  if (config_.max_in_flight < 1) config_.max_in_flight = 1;
}

absl::StatusOr<std::vector<double>> RemoteBackend::ScoreOptions(
    const PromptInstance& prompt) const {
  {
    std::unique_lock<std::mutex> lock(mutex_);
    slot_free_.wait(lock, [this] { return in_flight_ < config_.max_in_flight; });
    ++in_flight_;
  }
  auto result = HttpScore(config_.endpoint, prompt.text, prompt.labels,
                          config_.http);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    --in_flight_;
  }
  slot_free_.notify_one();
  return result;
}

}  // namespace ragcal
