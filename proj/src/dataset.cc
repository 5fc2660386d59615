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

#include "ragcal/dataset.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "fmt/format.h"
#include "nlohmann/json.hpp"
#include "ragcal/text.h"

namespace ragcal {
namespace {

using json = nlohmann::json;

absl::StatusOr<std::string> RequireString(const json& record,
                                          const char* field) {
  auto it = record.find(field);
  if (it == record.end()) {
    return absl::InvalidArgumentError(StrCat("missing field \"", field,
                                                   "\""));
  }
  if (!it->is_string()) {
    return absl::InvalidArgumentError(
        StrCat("field \"", field, "\" must be a string"));
  }
  return it->get<std::string>();
}

// Accepts string or integer ids (PubMedQA keys records by numeric PMID).
absl::StatusOr<std::string> RequireId(const json& record,
                                      std::initializer_list<const char*> keys) {
  for (const char* key : keys) {
    auto it = record.find(key);
    if (it == record.end()) continue;
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<int64_t>());
    return absl::InvalidArgumentError(
        StrCat("field \"", key, "\" must be a string or integer"));
  }
  return absl::InvalidArgumentError(
      StrCat("missing id field (\"", fmt::join(keys, "\" or \""), "\")"));
}

std::optional<std::string> OptionalText(const json& record,
                                        const char* field) {
  auto it = record.find(field);
  if (it == record.end() || !it->is_string()) return std::nullopt;
  std::string text = it->get<std::string>();
  if (IsBlank(text)) return std::nullopt;
  return text;
}

absl::StatusOr<QaItem> ParseGeneric(const json& record) {
  QaItem item;
  auto id = RequireId(record, {"id"});
  if (!id.ok()) return id.status();
  item.id = *std::move(id);
  auto question = RequireString(record, "question");
  if (!question.ok()) return question.status();
  item.question = *std::move(question);

  auto options = record.find("options");
  if (options == record.end() || !options->is_array()) {
    return absl::InvalidArgumentError("field \"options\" must be an array");
  }
  for (const json& option : *options) {
    if (!option.is_string()) {
      return absl::InvalidArgumentError("options must be strings");
    }
    item.options.push_back(option.get<std::string>());
  }

  auto gold = record.find("gold_index");
  if (gold == record.end()) gold = record.find("gold");
  if (gold == record.end()) {
    return absl::InvalidArgumentError("missing field \"gold_index\"");
  }
  if (gold->is_number_integer()) {
    item.gold_index = gold->get<int>();
  } else if (gold->is_string()) {
    const std::string answer = gold->get<std::string>();
    auto found = std::find(item.options.begin(), item.options.end(), answer);
    if (found == item.options.end()) {
      return absl::InvalidArgumentError(StrCat(
          "gold answer \"", answer, "\" is not among the options"));
    }
    item.gold_index = static_cast<int>(found - item.options.begin());
  } else {
    return absl::InvalidArgumentError(
        "gold answer must be an option index or option text");
  }

  if (record.contains("rationale") && !record["rationale"].is_null()) {
    if (!record["rationale"].is_string()) {
      return absl::InvalidArgumentError("field \"rationale\" must be a string");
    }
    item.rationale = record["rationale"].get<std::string>();
  }
  if (auto tag = record.find("dataset_tag");
      tag != record.end() && tag->is_string()) {
    item.dataset_tag = tag->get<std::string>();
  }
  return item;
}

absl::StatusOr<QaItem> ParsePubMedQa(const json& record) {
  QaItem item;
  item.dataset_tag = "pubmedqa";
  auto id = RequireId(record, {"id", "pubid", "PMID"});
  if (!id.ok()) return id.status();
  item.id = *std::move(id);
  auto question = RequireString(record, "QUESTION");
  if (!question.ok()) return question.status();
  item.question = *std::move(question);
  item.options = {"yes", "no", "maybe"};

  auto decision = RequireString(record, "final_decision");
  if (!decision.ok()) return decision.status();
  const std::string answer =
      ToLower(Trim(*decision));
  auto found = std::find(item.options.begin(), item.options.end(), answer);
  if (found == item.options.end()) {
    return absl::InvalidArgumentError(StrCat(
        "gold answer \"", *decision, "\" is not among the options"));
  }
  item.gold_index = static_cast<int>(found - item.options.begin());

  if (auto contexts = record.find("CONTEXTS"); contexts != record.end()) {
    if (!contexts->is_array()) {
      return absl::InvalidArgumentError("field \"CONTEXTS\" must be an array");
    }
    std::vector<std::string> paragraphs;
    for (const json& paragraph : *contexts) {
      if (!paragraph.is_string()) {
        return absl::InvalidArgumentError("CONTEXTS entries must be strings");
      }
      if (!IsBlank(paragraph.get<std::string>())) {
        paragraphs.push_back(paragraph.get<std::string>());
      }
    }
    if (!paragraphs.empty()) item.rationale = fmt::format("{}", fmt::join(paragraphs, "\n\n"));
  }
  return item;
}

absl::StatusOr<QaItem> ParseMedMcqa(const json& record) {
  QaItem item;
  item.dataset_tag = "medmcqa";
  auto id = RequireId(record, {"id"});
  if (!id.ok()) return id.status();
  item.id = *std::move(id);
  auto question = RequireString(record, "question");
  if (!question.ok()) return question.status();
  item.question = *std::move(question);
  for (const char* field : {"opa", "opb", "opc", "opd"}) {
    auto option = RequireString(record, field);
    if (!option.ok()) return option.status();
    item.options.push_back(*std::move(option));
  }
  auto cop = record.find("cop");
  if (cop == record.end() || !cop->is_number_integer()) {
    return absl::InvalidArgumentError("field \"cop\" must be an integer");
  }
  const int correct_option = cop->get<int>();
  if (correct_option < 1 || correct_option > 4) {
    return absl::InvalidArgumentError(StrCat(
        "gold answer cop=", correct_option, " is not among the options 1..4"));
  }
  item.gold_index = correct_option - 1;
  item.rationale = OptionalText(record, "exp");
  return item;
}

}  // namespace

bool QaItem::has_rationale() const {
  return rationale.has_value() && !IsBlank(*rationale);
}

absl::StatusOr<DatasetFormat> ParseDatasetFormat(std::string_view name) {
  if (name == "generic") return DatasetFormat::kGeneric;
  if (name == "pubmedqa") return DatasetFormat::kPubMedQa;
  if (name == "medmcqa") return DatasetFormat::kMedMcqa;
  return absl::InvalidArgumentError(
      StrCat("unknown dataset format \"", name,
                   "\" (expected generic, pubmedqa or medmcqa)"));
}

std::string_view DatasetFormatName(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::kGeneric:
      return "generic";
    case DatasetFormat::kPubMedQa:
      return "pubmedqa";
    case DatasetFormat::kMedMcqa:
      return "medmcqa";
  }
  return "generic";
}

absl::Status ValidateItem(const QaItem& item) {
  const int num_options = item.num_options();
  if (num_options < kMinOptions || num_options > kMaxOptions) {
    return absl::InvalidArgumentError(
        StrCat("item \"", item.id, "\" has ", num_options,
                     " options; expected ", kMinOptions, "..", kMaxOptions));
  }
  if (item.gold_index < 0 || item.gold_index >= num_options) {
    return absl::InvalidArgumentError(
        StrCat("item \"", item.id, "\" gold index ", item.gold_index,
                     " is not among its ", num_options, " options"));
  }
  if (item.rationale.has_value() && IsBlank(*item.rationale)) {
    return absl::InvalidArgumentError(
        StrCat("item \"", item.id, "\" has a blank rationale"));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<QaItem>> ParseDataset(std::string_view contents,
                                                 DatasetFormat format) {
  std::vector<QaItem> items;
  std::unordered_set<std::string> seen_ids;
  int line_number = 0;
  for (std::string_view line : Split(contents, '\n')) {
    ++line_number;
    if (IsBlank(line)) continue;
    auto fail = [line_number](const absl::Status& status) {
      return absl::Status(status.code(), StrCat("line ", line_number,
                                                      ": ", status.message()));
    };
    json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (record.is_discarded() || !record.is_object()) {
      return fail(absl::InvalidArgumentError("not a JSON object"));
    }
    absl::StatusOr<QaItem> item;
    switch (format) {
      case DatasetFormat::kGeneric:
        item = ParseGeneric(record);
        break;
      case DatasetFormat::kPubMedQa:
        item = ParsePubMedQa(record);
        break;
      case DatasetFormat::kMedMcqa:
        item = ParseMedMcqa(record);
        break;
    }
    if (!item.ok()) return fail(item.status());
    if (absl::Status status = ValidateItem(*item); !status.ok()) {
      return fail(status);
    }
    if (!seen_ids.insert(item->id).second) {
      return fail(absl::InvalidArgumentError(
          StrCat("duplicate id \"", item->id, "\"")));
    }
    items.push_back(*std::move(item));
  }
  return items;
}

absl::StatusOr<std::vector<QaItem>> LoadDataset(const std::string& path,
                                                DatasetFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(
        StrCat("cannot open dataset file \"", path, "\""));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto items = ParseDataset(buffer.str(), format);
  if (!items.ok()) {
    return absl::Status(items.status().code(),
                        StrCat(path, ": ", items.status().message()));
  }
  return items;
}

std::vector<QaItem> FilterWithRationale(const std::vector<QaItem>& items) {
  std::vector<QaItem> kept;
  for (const QaItem& item : items) {
    if (item.has_rationale()) kept.push_back(item);
  }
  return kept;
}

std::string SerializeGeneric(const std::vector<QaItem>& items) {
  std::string out;
  for (const QaItem& item : items) {
    json record = {{"id", item.id},
                   {"question", item.question},
                   {"options", item.options},
                   {"gold_index", item.gold_index},
                   {"dataset_tag", item.dataset_tag}};
    if (item.rationale.has_value()) record["rationale"] = *item.rationale;
    StrAppend(&out, record.dump(), "\n");
  }
  return out;
}

absl::Status WriteGenericDataset(const std::vector<QaItem>& items,
                                 const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::UnavailableError(
        StrCat("cannot write dataset file \"", path, "\""));
  }
  out << SerializeGeneric(items);
  if (!out) {
    return absl::DataLossError(StrCat("write failed for \"", path, "\""));
  }
  return absl::OkStatus();
}

}  // namespace ragcal
