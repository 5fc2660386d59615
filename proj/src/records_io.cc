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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlohmann/json.hpp"
#include "ragcal/records.h"
#include "ragcal/text.h"

namespace ragcal {

using json = nlohmann::json;

std::string_view BackendKindName(BackendKind kind) {
  return kind == BackendKind::kRemote ? "remote" : "synthetic";
}

std::string SerializeRecords(const std::vector<PredictionRecord>& records) {
  std::string out;
  for (const PredictionRecord& record : records) {
    const json line = {
        {"item_id", record.item_id},
        {"dataset", record.dataset},
        {"backend_kind", BackendKindName(record.backend.kind)},
        {"backend", record.backend.name},
        {"mixture", MixtureName(record.scenario.mixture)},
        {"position", record.scenario.position_tag()},
        {"seed", record.scenario.seed},
        {"chosen_index", record.chosen_index},
        {"gold_index", record.gold_index},
        {"correct", record.correct},
        {"entropy", record.entropy},
        {"best_prob", record.best_prob},
        {"p", record.p},
        {"v", record.v},
    };
    StrAppend(&out, line.dump(), "\n");
  }
  return out;
}

absl::StatusOr<std::vector<PredictionRecord>> ParseRecords(
    std::string_view contents) {
  std::vector<PredictionRecord> records;
  int line_number = 0;
  for (std::string_view line : Split(contents, '\n')) {
    ++line_number;
    if (IsBlank(line)) continue;
    auto fail = [line_number](std::string_view message) {
      return absl::InvalidArgumentError(
          StrCat("records line ", line_number, ": ", message));
    };
    const json parsed = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded() || !parsed.is_object()) {
      return fail("not a JSON object");
    }
    try {
      PredictionRecord record;
      record.item_id = parsed.at("item_id").get<std::string>();
      record.dataset = parsed.at("dataset").get<std::string>();
      record.backend.kind = parsed.at("backend_kind").get<std::string>() ==
                                    "remote"
                                ? BackendKind::kRemote
                                : BackendKind::kSynthetic;
      record.backend.name = parsed.at("backend").get<std::string>();
      auto mixture = ParseMixture(parsed.at("mixture").get<std::string>());
      if (!mixture.ok()) return fail(Message(mixture.status()));
      record.scenario.mixture = *mixture;
      if (!record.scenario.is_baseline()) {
        auto position = ParsePosition(parsed.at("position").get<std::string>());
        if (!position.ok()) return fail(Message(position.status()));
        record.scenario.position = *position;
      }
      record.scenario.seed = parsed.at("seed").get<uint64_t>();
      record.chosen_index = parsed.at("chosen_index").get<int>();
      record.gold_index = parsed.at("gold_index").get<int>();
      record.correct = parsed.at("correct").get<bool>();
      record.entropy = parsed.at("entropy").get<double>();
      record.best_prob = parsed.at("best_prob").get<double>();
      record.p = parsed.at("p").get<std::vector<double>>();
      record.v = parsed.value("v", std::vector<double>{});
      records.push_back(std::move(record));
    } catch (const json::exception& e) {
      return fail(e.what());
    }
  }
  return records;
}

absl::Status WriteFileAtomically(const std::string& path,
                                 std::string_view contents) {
  const std::string temp = StrCat(path, ".tmp");
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) {
      return absl::UnavailableError(
          StrCat("cannot open \"", temp, "\" for writing"));
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
      return absl::DataLossError(StrCat("write failed for \"", temp,
                                              "\""));
    }
  }
  std::error_code error;
  std::filesystem::rename(temp, path, error);
  if (error) {
    return absl::UnavailableError(StrCat("cannot rename \"", temp,
                                               "\": ", error.message()));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(StrCat("cannot open \"", path, "\""));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::Status WriteRecords(const std::vector<PredictionRecord>& records,
                          const std::string& path) {
  return WriteFileAtomically(path, SerializeRecords(records));
}

absl::StatusOr<std::vector<PredictionRecord>> ReadRecords(
    const std::string& path) {
  auto contents = ReadFile(path);
  if (!contents.ok()) return contents.status();
  return ParseRecords(*contents);
}

}  // namespace ragcal
