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

// Flat-text prompt rendering for forced-choice scoring.
//
// Layout, sections separated by one blank line:
//
//   <system prompt>
//   [documents block]            <- pre-q
//   Here is the question:
//   <question>
//   [documents block]            <- aft-q
//   Here are the potential choices:
//   A. <option 0>
//   B. <option 1>
//   ...
//   [documents block]            <- aft-c
//   Answer:
//
// The documents block is the header line followed by the document texts
// separated by blank lines. The prompt ends with "Answer:" and no trailing
// newline, so the next token a model emits is the answer label.

#ifndef RAGCAL_PROMPT_H_
#define RAGCAL_PROMPT_H_

#include <map>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ragcal/contextgen.h"
#include "ragcal/dataset.h"

namespace ragcal {

inline constexpr char kDefaultSystemPrompt[] =
    "You are a helpful medical expert, and your task is to answer a "
    "multi-choice medical question using the relevant documents. Please first "
    "think step-by-step and then choose the answer from the provided options. "
    "Your responses will be used for research purposes only, so please have a "
    "definite answer.";

struct PromptTemplate {
  std::string system_prompt = kDefaultSystemPrompt;
  std::string documents_header = "Here are the relevant documents:";
  std::string question_header = "Here is the question:";
  std::string choices_header = "Here are the potential choices:";
  std::string answer_cue = "Answer:";
};

// Reads a JSON object whose keys (system_prompt, documents_header,
// question_header, choices_header, answer_cue) override the defaults. Unknown
// keys are rejected.
absl::StatusOr<PromptTemplate> LoadPromptTemplate(const std::string& path);
absl::StatusOr<PromptTemplate> ParsePromptTemplate(const std::string& text);

struct Relabeling {
  std::vector<std::string> labels;  // "A", "B", ...
  std::map<std::string, int> label_to_option;
};

// Label i maps to option i. Fails unless 2 <= options.size() <= 26.
absl::StatusOr<Relabeling> RelabelOptions(
    const std::vector<std::string>& options);

struct PromptInstance {
  std::string item_id;
  ScenarioSpec scenario;
  std::string text;
  std::vector<std::string> labels;
  std::map<std::string, int> label_to_option;
};

// Renders `item` with `docs` placed according to `scenario.position`. `docs`
// must be empty exactly when the scenario is the baseline.
absl::StatusOr<PromptInstance> RenderPrompt(
    const QaItem& item, const std::vector<ContextDoc>& docs,
    const ScenarioSpec& scenario,
    const PromptTemplate& prompt_template = PromptTemplate());

}  // namespace ragcal

#endif  // RAGCAL_PROMPT_H_
