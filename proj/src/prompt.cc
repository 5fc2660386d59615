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

#include "ragcal/prompt.h"

#include <fstream>
#include <sstream>

#include "nlohmann/json.hpp"
#include "ragcal/text.h"

namespace ragcal {

absl::StatusOr<PromptTemplate> ParsePromptTemplate(const std::string& text) {
  const nlohmann::json config =
      nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (config.is_discarded() || !config.is_object()) {
    return absl::InvalidArgumentError("prompt template must be a JSON object");
  }
  PromptTemplate result;
  const std::pair<const char*, std::string*> fields[] = {
      {"system_prompt", &result.system_prompt},
      {"documents_header", &result.documents_header},
      {"question_header", &result.question_header},
      {"choices_header", &result.choices_header},
      {"answer_cue", &result.answer_cue},
  };
  for (const auto& [key, value] : config.items()) {
    std::string* target = nullptr;
    for (const auto& [name, field] : fields) {
      if (key == name) target = field;
    }
    if (target == nullptr) {
      return absl::InvalidArgumentError(
          StrCat("unknown prompt template key \"", key, "\""));
    }
    if (!value.is_string()) {
      return absl::InvalidArgumentError(
          StrCat("prompt template key \"", key, "\" must be a string"));
    }
    *target = value.get<std::string>();
  }
  if (result.answer_cue.empty()) {
    return absl::InvalidArgumentError("answer_cue must not be empty");
  }
  return result;
}

absl::StatusOr<PromptTemplate> LoadPromptTemplate(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(
        StrCat("cannot open prompt template \"", path, "\""));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParsePromptTemplate(buffer.str());
}

absl::StatusOr<Relabeling> RelabelOptions(
    const std::vector<std::string>& options) {
  const int count = static_cast<int>(options.size());
  if (count < kMinOptions || count > kMaxOptions) {
    return absl::InvalidArgumentError(StrCat(
        "cannot label ", count, " options; expected ", kMinOptions, "..",
        kMaxOptions));
  }
  Relabeling relabeling;
  for (int i = 0; i < count; ++i) {
    std::string label(1, static_cast<char>('A' + i));
    relabeling.label_to_option.emplace(label, i);
    relabeling.labels.push_back(std::move(label));
  }
  return relabeling;
}

absl::StatusOr<PromptInstance> RenderPrompt(
    const QaItem& item, const std::vector<ContextDoc>& docs,
    const ScenarioSpec& scenario, const PromptTemplate& prompt_template) {
  if (docs.empty() != scenario.is_baseline()) {
    return absl::InvalidArgumentError(StrCat(
        "item \"", item.id, "\": mixture ", MixtureName(scenario.mixture),
        " rendered with ", docs.size(), " documents"));
  }
  auto relabeling = RelabelOptions(item.options);
  if (!relabeling.ok()) return relabeling.status();

  std::string documents_block;
  if (!docs.empty()) {
    documents_block = prompt_template.documents_header;
    for (size_t i = 0; i < docs.size(); ++i) {
      StrAppend(&documents_block, i == 0 ? "\n" : "\n\n", docs[i].text);
    }
    StrAppend(&documents_block, "\n\n");
  }
  auto block_at = [&](Position slot) -> std::string_view {
    return !docs.empty() && scenario.position == slot ? documents_block
                                                      : std::string_view();
  };

  std::string text = StrCat(prompt_template.system_prompt, "\n\n");
  StrAppend(&text, block_at(Position::kPreQ));
  StrAppend(&text, prompt_template.question_header, "\n", item.question,
                  "\n\n");
  StrAppend(&text, block_at(Position::kAftQ));
  StrAppend(&text, prompt_template.choices_header, "\n");
  for (int i = 0; i < item.num_options(); ++i) {
    StrAppend(&text, relabeling->labels[i], ". ", item.options[i], "\n");
  }
  StrAppend(&text, "\n", block_at(Position::kAftC));
  StrAppend(&text, prompt_template.answer_cue);

  PromptInstance prompt;
  prompt.item_id = item.id;
  prompt.scenario = scenario.Canonical();
  prompt.text = std::move(text);
  prompt.labels = std::move(relabeling->labels);
  prompt.label_to_option = std::move(relabeling->label_to_option);
  return prompt;
}

}  // namespace ragcal
