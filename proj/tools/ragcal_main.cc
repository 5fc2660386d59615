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

// ragcal: run the pseudo-RAG calibration grid and produce its reports.
//
//   ragcal run --dataset data.jsonl --format medmcqa --backend synthetic \
//       --out out/ --cache-dir cache/
//   ragcal report --records out/records.jsonl --out out/
//   ragcal export-violin --records out/records.jsonl --out violin.csv
//   ragcal confusion --records out/records.jsonl --class-names yes,no,maybe
//
// `--config file.json` on `run` reads a JSON object whose keys are the long
// flag names (e.g. {"dataset": "...", "mixtures": ["ans1", "oth3"]}); values
// there override the command line.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlohmann/json.hpp"
#include "ragcal/records.h"
#include "ragcal/report.h"
#include "ragcal/runner.h"
#include "ragcal/text.h"

namespace {

using ragcal::BackendKind;
using ragcal::RunConfig;
using ragcal::StrCat;

struct RunFlags {
  std::string config_path;
  std::string dataset;
  std::string format = "generic";
  std::string backend = "synthetic";
  std::string endpoint;
  std::string model_name;
  std::string mixtures = "none,ans1,ans1-oth2,oth3";
  std::string positions = "pre-q,aft-q,aft-c";
  uint64_t seed = 0;
  int ece_bins = 10;
  int ace_bins = 10;
  std::string cache_dir = "cache";
  std::string out = "out";
  int concurrency = 4;
  bool resume = false;
  bool keep_all_items = false;
  std::string prompt_template;
  int answer_slot = 0;
  double synthetic_b = 0.0;
  double synthetic_lambda = 2.0;
  double synthetic_sigma = 0.5;
  std::optional<uint64_t> synthetic_seed;
  double timeout = 120.0;
  int retries = 3;
};

// Comma-separated string or JSON array of strings.
std::string JoinedList(const nlohmann::json& value) {
  if (value.is_string()) return value.get<std::string>();
  std::string joined;
  for (const auto& entry : value) {
    if (!joined.empty()) joined += ',';
    joined += entry.get<std::string>();
  }
  return joined;
}

absl::Status ApplyConfigFile(RunFlags& flags) {
  auto contents = ragcal::ReadFile(flags.config_path);
  if (!contents.ok()) return contents.status();
  const nlohmann::json config =
      nlohmann::json::parse(*contents, nullptr, /*allow_exceptions=*/false);
  if (config.is_discarded() || !config.is_object()) {
    return absl::InvalidArgumentError(
        StrCat(flags.config_path, ": not a JSON object"));
  }
  try {
    for (const auto& [key, value] : config.items()) {
      if (key == "dataset") flags.dataset = value.get<std::string>();
      else if (key == "format") flags.format = value.get<std::string>();
      else if (key == "backend") flags.backend = value.get<std::string>();
      else if (key == "endpoint") flags.endpoint = value.get<std::string>();
      else if (key == "model-name") flags.model_name = value.get<std::string>();
      else if (key == "mixtures") flags.mixtures = JoinedList(value);
      else if (key == "positions") flags.positions = JoinedList(value);
      else if (key == "seed") flags.seed = value.get<uint64_t>();
      else if (key == "ece-bins") flags.ece_bins = value.get<int>();
      else if (key == "ace-bins") flags.ace_bins = value.get<int>();
      else if (key == "cache-dir") flags.cache_dir = value.get<std::string>();
      else if (key == "out") flags.out = value.get<std::string>();
      else if (key == "concurrency") flags.concurrency = value.get<int>();
      else if (key == "resume") flags.resume = value.get<bool>();
      else if (key == "keep-all-items") flags.keep_all_items = value.get<bool>();
      else if (key == "prompt-template") flags.prompt_template = value.get<std::string>();
      else if (key == "answer-slot") flags.answer_slot = value.get<int>();
      else if (key == "synthetic-b") flags.synthetic_b = value.get<double>();
      else if (key == "synthetic-lambda") flags.synthetic_lambda = value.get<double>();
      else if (key == "synthetic-sigma") flags.synthetic_sigma = value.get<double>();
      else if (key == "synthetic-seed") flags.synthetic_seed = value.get<uint64_t>();
      else if (key == "timeout") flags.timeout = value.get<double>();
      else if (key == "retries") flags.retries = value.get<int>();
      else {
        return absl::InvalidArgumentError(
            StrCat(flags.config_path, ": unknown key \"", key, "\""));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        StrCat(flags.config_path, ": ", e.what()));
  }
  return absl::OkStatus();
}

absl::StatusOr<RunConfig> ToRunConfig(const RunFlags& flags) {
  RunConfig config;
  if (flags.dataset.empty()) {
    return absl::InvalidArgumentError("--dataset is required");
  }
  config.dataset_path = flags.dataset;
  auto format = ragcal::ParseDatasetFormat(flags.format);
  if (!format.ok()) return format.status();
  config.format = *format;
  config.require_rationale = !flags.keep_all_items;

  if (flags.backend == "synthetic") {
    config.backend = BackendKind::kSynthetic;
  } else if (flags.backend == "remote") {
    config.backend = BackendKind::kRemote;
  } else {
    return absl::InvalidArgumentError(StrCat(
        "--backend must be synthetic or remote, got \"", flags.backend, "\""));
  }
  config.synthetic = {flags.synthetic_b, flags.synthetic_lambda,
                      flags.synthetic_sigma,
                      flags.synthetic_seed.value_or(flags.seed)};
  config.remote.endpoint = flags.endpoint;
  config.remote.model_name = flags.model_name;
  config.remote.http.timeout_seconds = flags.timeout;
  config.remote.http.max_retries = flags.retries;
  if (const char* token = std::getenv(ragcal::kAuthTokenEnv)) {
    config.remote.http.auth_token = token;
  }

  config.mixtures.clear();
  for (const std::string& name : ragcal::SplitList(flags.mixtures)) {
    auto mixture = ragcal::ParseMixture(name);
    if (!mixture.ok()) return mixture.status();
    config.mixtures.push_back(*mixture);
  }
  config.positions.clear();
  for (const std::string& name : ragcal::SplitList(flags.positions)) {
    auto position = ragcal::ParsePosition(name);
    if (!position.ok()) return position.status();
    config.positions.push_back(*position);
  }
  config.seed = flags.seed;
  config.metrics = {flags.ece_bins, flags.ace_bins};
  config.context.answer_slot = flags.answer_slot;
  if (!flags.prompt_template.empty()) {
    auto prompt_template = ragcal::LoadPromptTemplate(flags.prompt_template);
    if (!prompt_template.ok()) return prompt_template.status();
    config.prompt_template = *std::move(prompt_template);
  }
  config.cache_dir = flags.cache_dir;
  config.out_dir = flags.out;
  config.concurrency = flags.concurrency;
  config.resume = flags.resume;
  if (absl::Status status = ragcal::ValidateRunConfig(config); !status.ok()) {
    return status;
  }
  return config;
}

int Fail(const absl::Status& status, int code = ragcal::kExitError) {
  std::cerr << "error: " << status.message() << "\n";
  return code;
}

int RunCommand(RunFlags flags) {
  if (!flags.config_path.empty()) {
    if (absl::Status status = ApplyConfigFile(flags); !status.ok()) {
      return Fail(status, ragcal::kExitUsage);
    }
  }
  auto config = ToRunConfig(flags);
  if (!config.ok()) return Fail(config.status(), ragcal::kExitUsage);
  auto result = ragcal::RunGrid(*config);
  if (!result.ok()) return Fail(result.status());
  if (absl::Status status = ragcal::WriteRunOutputs(*config, *result);
      !status.ok()) {
    return Fail(status);
  }
  std::cerr << result->records.size() << " records, " << result->backend_calls
            << " backend calls, " << result->cache_hits << " cache hits\n";
  if (!result->complete()) {
    std::cerr << result->failures.size()
              << " cells failed; see manifest.json and rerun with --resume\n";
    return ragcal::kExitPartial;
  }
  return ragcal::kExitComplete;
}

absl::StatusOr<std::vector<ragcal::PredictionRecord>> LoadRecords(
    const std::string& path) {
  auto records = ragcal::ReadRecords(path);
  if (!records.ok()) return records.status();
  if (records->empty()) {
    return absl::InvalidArgumentError(StrCat(path, " has no records"));
  }
  return records;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidence-calibration harness for pseudo-RAG multiple-choice QA"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "Score the experiment grid");
  run->add_option("--config", run_flags.config_path,
                  "JSON file whose keys override the flags");
  run->add_option("--dataset", run_flags.dataset, "Line-delimited JSON dataset");
  run->add_option("--format", run_flags.format, "generic | pubmedqa | medmcqa")
      ->capture_default_str();
  run->add_option("--backend", run_flags.backend, "synthetic | remote")
      ->capture_default_str();
  run->add_option("--endpoint", run_flags.endpoint,
                  "Label-logprob adapter base URL (remote backend)");
  run->add_option("--model-name", run_flags.model_name,
                  "Backend name used in caches and reports (remote backend)");
  run->add_option("--mixtures", run_flags.mixtures,
                  "Comma list of none, ans1, ans1-oth2, oth3")
      ->capture_default_str();
  run->add_option("--positions", run_flags.positions,
                  "Comma list of pre-q, aft-q, aft-c")
      ->capture_default_str();
  run->add_option("--seed", run_flags.seed, "Distractor sampling seed")
      ->capture_default_str();
  run->add_option("--ece-bins", run_flags.ece_bins)->capture_default_str();
  run->add_option("--ace-bins", run_flags.ace_bins)->capture_default_str();
  run->add_option("--cache-dir", run_flags.cache_dir)->capture_default_str();
  run->add_option("--out", run_flags.out, "Output directory")
      ->capture_default_str();
  run->add_option("--concurrency", run_flags.concurrency,
                  "Worker threads and in-flight backend calls")
      ->capture_default_str();
  run->add_flag("--resume", run_flags.resume,
                "Continue a run in an existing output directory");
  run->add_flag("--keep-all-items", run_flags.keep_all_items,
                "Keep items without rationales (baseline-only grids)");
  run->add_option("--prompt-template", run_flags.prompt_template,
                  "JSON prompt template overrides");
  run->add_option("--answer-slot", run_flags.answer_slot,
                  "Slot of the answer document within ans1-oth2 (0..2)")
      ->capture_default_str();
  run->add_option("--synthetic-b", run_flags.synthetic_b,
                  "Synthetic gold-logit boost without documents")
      ->capture_default_str();
  run->add_option("--synthetic-lambda", run_flags.synthetic_lambda,
                  "Synthetic gold-logit boost from the answer document")
      ->capture_default_str();
  run->add_option("--synthetic-sigma", run_flags.synthetic_sigma,
                  "Synthetic logit noise standard deviation")
      ->capture_default_str();
  run->add_option("--synthetic-seed", run_flags.synthetic_seed,
                  "Synthetic noise seed (defaults to --seed)");
  run->add_option("--timeout", run_flags.timeout,
                  "Remote request timeout in seconds")
      ->capture_default_str();
  run->add_option("--retries", run_flags.retries, "Remote retry count")
      ->capture_default_str();

  std::string records_path;
  std::string out_path;
  int ece_bins = 10;
  int ace_bins = 10;
  CLI::App* report = app.add_subcommand("report", "Rebuild reports from records");
  report->add_option("--records", records_path)->required();
  report->add_option("--out", out_path, "Output directory")->required();
  report->add_option("--ece-bins", ece_bins)->capture_default_str();
  report->add_option("--ace-bins", ace_bins)->capture_default_str();

  CLI::App* violin =
      app.add_subcommand("export-violin", "Write long-format violin CSV");
  violin->add_option("--records", records_path)->required();
  violin->add_option("--out", out_path, "CSV file")->required();

  std::string class_names;
  std::string csv_path;
  CLI::App* confusion = app.add_subcommand(
      "confusion", "Tabulate predicted classes of incorrect answers");
  confusion->add_option("--records", records_path)->required();
  confusion->add_option("--class-names", class_names,
                        "Comma list naming classes in option order");
  confusion->add_option("--out", csv_path, "Also write gold,predicted,count CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version are "errors" that exit 0.
    const int code = app.exit(e);
    return code == 0 ? ragcal::kExitComplete : ragcal::kExitUsage;
  }

  if (*run) return RunCommand(run_flags);

  auto records = LoadRecords(records_path);
  if (!records.ok()) return Fail(records.status());

  if (*report) {
    std::error_code error;
    std::filesystem::create_directories(out_path, error);
    if (absl::Status status =
            ragcal::WriteReportFiles(*records, {ece_bins, ace_bins}, out_path);
        !status.ok()) {
      return Fail(status);
    }
    return 0;
  }
  if (*violin) {
    if (absl::Status status = ragcal::ExportViolin(*records, out_path);
        !status.ok()) {
      return Fail(status);
    }
    return 0;
  }
  if (*confusion) {
    std::vector<std::string> names;
    if (!class_names.empty()) names = ragcal::SplitList(class_names);
    const ragcal::ConfusionTable table = ragcal::ErrorConfusion(*records);
    std::cout << ragcal::ConfusionMarkdown(table, names);
    if (!csv_path.empty()) {
      if (absl::Status status = ragcal::WriteFileAtomically(
              csv_path, ragcal::ConfusionCsv(table, names));
          !status.ok()) {
        return Fail(status);
      }
    }
    return 0;
  }
  return ragcal::kExitUsage;
}
