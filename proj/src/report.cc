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

#include "ragcal/report.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "fmt/format.h"
#include "fmt/ranges.h"
#include "ragcal/text.h"

namespace ragcal {

GroupKey GroupKey::Of(const PredictionRecord& record) {
  const ScenarioSpec scenario = record.scenario.Canonical();
  return {record.backend.name, record.dataset, scenario.mixture,
          scenario.position};
}

std::string_view GroupKey::position_tag() const {
  return mixture == Mixture::kNone ? std::string_view("none")
                                   : PositionName(position);
}

std::optional<MeanStd> ComputeMeanStd(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double value : values) sum += value;
  const double mean = sum / n;
  double squares = 0.0;
  for (double value : values) squares += (value - mean) * (value - mean);
  return MeanStd{mean, std::sqrt(squares / n)};
}

namespace {

bool ExportOrder(const PredictionRecord& a, const PredictionRecord& b) {
  const GroupKey ka = GroupKey::Of(a);
  const GroupKey kb = GroupKey::Of(b);
  if (ka != kb) return ka < kb;
  return a.item_id < b.item_id;
}

absl::StatusOr<MetricReport> ReportForGroup(
    const GroupKey& key, const std::vector<PredictionRecord>& group,
    const MetricConfig& config) {
  MetricReport report;
  report.key = key;
  std::vector<double> entropy[2];
  std::vector<double> best_prob[2];
  const int num_classes = group.front().num_classes();
  for (const PredictionRecord& record : group) {
    if (record.num_classes() != num_classes) {
      return absl::InvalidArgumentError(StrCat(
          "group ", key.backend, "/", key.dataset, "/",
          MixtureName(key.mixture), "/", key.position_tag(),
          " mixes option counts ", num_classes, " and ", record.num_classes()));
    }
    const bool correct = record.chosen_index == record.gold_index;
    entropy[correct].push_back(record.entropy);
    best_prob[correct].push_back(record.best_prob);
  }
  report.n_correct = static_cast<int>(entropy[1].size());
  report.n_incorrect = static_cast<int>(entropy[0].size());
  report.entropy_correct = ComputeMeanStd(entropy[1]);
  report.best_prob_correct = ComputeMeanStd(best_prob[1]);
  report.entropy_incorrect = ComputeMeanStd(entropy[0]);
  report.best_prob_incorrect = ComputeMeanStd(best_prob[0]);

  auto accuracy = Accuracy(group);
  if (!accuracy.ok()) return accuracy.status();
  report.accuracy = *accuracy;
  auto ece = Ece(group, config.ece_bins);
  if (!ece.ok()) return ece.status();
  report.ece = *ece;
  auto ace = Ace(group, config.ace_bins);
  if (!ace.ok()) return ace.status();
  report.ace = *ace;
  return report;
}

std::string FormatNumber(double value) {
  return fmt::format("{:.17g}", value);
}

std::string FormatOptional(const std::optional<double>& value) {
  return value.has_value() ? FormatNumber(*value) : "--";
}

std::string FormatMeanStdCell(const std::optional<MeanStd>& value) {
  if (!value.has_value()) return "--";
  return fmt::format("{:.3f}±{:.3f}", value->mean, value->stddev);
}

std::string FormatSigned(const std::optional<double>& value) {
  if (!value.has_value()) return "--";
  return fmt::format("{:+.3f}", *value);
}

// Display width in code points; the tables only carry UTF-8 '±' beyond ASCII.
size_t DisplayWidth(std::string_view text) {
  size_t width = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) != 0x80) ++width;
  }
  return width;
}

std::string MarkdownTable(const std::vector<std::string>& header,
                          const std::vector<std::vector<std::string>>& rows,
                          const std::vector<bool>& right_align) {
  std::vector<size_t> widths(header.size(), 3);
  for (size_t c = 0; c < header.size(); ++c) {
    widths[c] = std::max(widths[c], DisplayWidth(header[c]));
    for (const auto& row : rows) {
      widths[c] = std::max(widths[c], DisplayWidth(row[c]));
    }
  }
  auto pad = [&](std::string_view text, size_t c) {
    const std::string fill(widths[c] - DisplayWidth(text), ' ');
    return right_align[c] ? StrCat(fill, text) : StrCat(text, fill);
  };
  std::string out = "|";
  for (size_t c = 0; c < header.size(); ++c) {
    StrAppend(&out, " ", pad(header[c], c), " |");
  }
  StrAppend(&out, "\n|");
  for (size_t c = 0; c < header.size(); ++c) {
    std::string rule(widths[c], '-');
    if (right_align[c]) rule.back() = ':';
    StrAppend(&out, " ", rule, " |");
  }
  StrAppend(&out, "\n");
  for (const auto& row : rows) {
    StrAppend(&out, "|");
    for (size_t c = 0; c < row.size(); ++c) {
      StrAppend(&out, " ", pad(row[c], c), " |");
    }
    StrAppend(&out, "\n");
  }
  return out;
}

std::string ClassName(const std::vector<std::string>& names, int index) {
  if (index >= 0 && index < static_cast<int>(names.size())) return names[index];
  if (index >= 0 && index < 26) return std::string(1, static_cast<char>('A' + index));
  return StrCat(index);
}

}  // namespace

absl::StatusOr<std::vector<MetricReport>> Aggregate(
    const std::vector<PredictionRecord>& records, const MetricConfig& config) {
  if (absl::Status status = ValidateMetricConfig(config); !status.ok()) {
    return status;
  }
  std::map<GroupKey, std::vector<PredictionRecord>> groups;
  for (const PredictionRecord& record : records) {
    groups[GroupKey::Of(record)].push_back(record);
  }
  std::vector<MetricReport> reports;
  for (auto& [key, group] : groups) {
    std::stable_sort(group.begin(), group.end(),
                     [](const PredictionRecord& a, const PredictionRecord& b) {
                       return a.item_id < b.item_id;
                     });
    auto report = ReportForGroup(key, group, config);
    if (!report.ok()) return report.status();
    reports.push_back(*std::move(report));
  }

  std::map<std::pair<std::string, std::string>, const MetricReport*> baselines;
  for (const MetricReport& report : reports) {
    if (report.key.mixture == Mixture::kNone) {
      baselines[{report.key.backend, report.key.dataset}] = &report;
    }
  }
  for (MetricReport& report : reports) {
    auto it = baselines.find({report.key.backend, report.key.dataset});
    if (it == baselines.end()) continue;
    report.delta_accuracy = report.accuracy - it->second->accuracy;
    report.delta_ace = report.ace - it->second->ace;
  }
  return reports;
}

std::string CsvField(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

absl::StatusOr<std::vector<std::vector<std::string>>> ParseCsv(
    std::string_view csv) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  for (size_t i = 0; i < csv.size(); ++i) {
    const char c = csv[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < csv.size() && csv[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty()) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      field_started = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < csv.size() && csv[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      field_started = false;
    } else {
      field += c;
      field_started = true;
    }
  }
  if (quoted) return absl::InvalidArgumentError("unterminated quoted CSV field");
  if (field_started || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string ReportCsv(const std::vector<MetricReport>& reports) {
  std::string out =
      "backend,dataset,mixture,position,n,n_correct,n_incorrect,accuracy,ece,"
      "ace,entropy_correct_mean,entropy_correct_std,best_prob_correct_mean,"
      "best_prob_correct_std,entropy_incorrect_mean,entropy_incorrect_std,"
      "best_prob_incorrect_mean,best_prob_incorrect_std,delta_accuracy,"
      "delta_ace\n";
  auto mean = [](const std::optional<MeanStd>& value) {
    return value ? FormatNumber(value->mean) : std::string("--");
  };
  auto stddev = [](const std::optional<MeanStd>& value) {
    return value ? FormatNumber(value->stddev) : std::string("--");
  };
  for (const MetricReport& r : reports) {
    const std::vector<std::string> fields = {
        CsvField(r.key.backend),
        CsvField(r.key.dataset),
        std::string(MixtureName(r.key.mixture)),
        std::string(r.key.position_tag()),
        StrCat(r.total()),
        StrCat(r.n_correct),
        StrCat(r.n_incorrect),
        FormatNumber(r.accuracy),
        FormatNumber(r.ece),
        FormatNumber(r.ace),
        mean(r.entropy_correct),
        stddev(r.entropy_correct),
        mean(r.best_prob_correct),
        stddev(r.best_prob_correct),
        mean(r.entropy_incorrect),
        stddev(r.entropy_incorrect),
        mean(r.best_prob_incorrect),
        stddev(r.best_prob_incorrect),
        FormatOptional(r.delta_accuracy),
        FormatOptional(r.delta_ace),
    };
    StrAppend(&out, fmt::join(fields, ","), "\n");
  }
  return out;
}

std::string ReportMarkdown(const std::vector<MetricReport>& reports) {
  const std::vector<std::string> header = {
      "Backend",           "Dataset",           "Mixture",
      "Position",          "N",                 "Entropy (Correct)",
      "Best Prob (Correct)", "Entropy (Incorrect)", "Best Prob (Incorrect)",
      "Accuracy",          "ECE",               "ACE",
      "ΔAccuracy",         "ΔACE"};
  const std::vector<bool> right_align = {false, false, false, false, true,
                                         true,  true,  true,  true,  true,
                                         true,  true,  true,  true};
  std::vector<std::vector<std::string>> rows;
  for (const MetricReport& r : reports) {
    rows.push_back({r.key.backend, r.key.dataset,
                    std::string(MixtureName(r.key.mixture)),
                    std::string(r.key.position_tag()), StrCat(r.total()),
                    FormatMeanStdCell(r.entropy_correct),
                    FormatMeanStdCell(r.best_prob_correct),
                    FormatMeanStdCell(r.entropy_incorrect),
                    FormatMeanStdCell(r.best_prob_incorrect),
                    fmt::format("{:.3f}", r.accuracy),
                    fmt::format("{:.3f}", r.ece),
                    fmt::format("{:.3f}", r.ace),
                    FormatSigned(r.delta_accuracy), FormatSigned(r.delta_ace)});
  }
  return MarkdownTable(header, rows, right_align);
}

std::vector<PredictionRecord> SortedForExport(
    std::vector<PredictionRecord> records) {
  std::stable_sort(records.begin(), records.end(), ExportOrder);
  return records;
}

std::string ViolinCsv(const std::vector<PredictionRecord>& records) {
  std::string out = "item_id,backend,mixture,position,correct,entropy,best_prob\n";
  for (const PredictionRecord& record : SortedForExport(records)) {
    const std::vector<std::string> fields = {
        CsvField(record.item_id),
        CsvField(record.backend.name),
        std::string(MixtureName(record.scenario.mixture)),
        std::string(record.scenario.position_tag()),
        record.correct ? "true" : "false",
        FormatNumber(record.entropy),
        FormatNumber(record.best_prob),
    };
    StrAppend(&out, fmt::join(fields, ","), "\n");
  }
  return out;
}

absl::Status ExportViolin(const std::vector<PredictionRecord>& records,
                          const std::string& path) {
  return WriteFileAtomically(path, ViolinCsv(records));
}

absl::StatusOr<std::vector<ViolinRow>> ParseViolinCsv(std::string_view csv) {
  auto table = ParseCsv(csv);
  if (!table.ok()) return table.status();
  if (table->empty()) return absl::InvalidArgumentError("empty violin CSV");
  const std::vector<std::string> expected = {
      "item_id", "backend", "mixture", "position",
      "correct", "entropy", "best_prob"};
  if ((*table)[0] != expected) {
    return absl::InvalidArgumentError("unexpected violin CSV header");
  }
  std::vector<ViolinRow> rows;
  for (size_t i = 1; i < table->size(); ++i) {
    const auto& fields = (*table)[i];
    if (fields.size() != expected.size()) {
      return absl::InvalidArgumentError(
          StrCat("violin CSV row ", i, " has ", fields.size(),
                       " fields"));
    }
    ViolinRow row;
    row.item_id = fields[0];
    row.backend = fields[1];
    row.mixture = fields[2];
    row.position = fields[3];
    row.correct = fields[4] == "true";
    char* end = nullptr;
    row.entropy = std::strtod(fields[5].c_str(), &end);
    if (end == fields[5].c_str()) {
      return absl::InvalidArgumentError(StrCat("bad entropy in row ", i));
    }
    row.best_prob = std::strtod(fields[6].c_str(), &end);
    if (end == fields[6].c_str()) {
      return absl::InvalidArgumentError(
          StrCat("bad best_prob in row ", i));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int ConfusionTable::total() const {
  int sum = 0;
  for (const auto& [gold, predicted] : rows) {
    for (const auto& [label, count] : predicted) sum += count;
  }
  return sum;
}

ConfusionTable ErrorConfusion(const std::vector<PredictionRecord>& records) {
  ConfusionTable table;
  for (const PredictionRecord& record : records) {
    table.num_classes = std::max(table.num_classes, record.num_classes());
    if (record.correct) continue;
    ++table.rows[record.gold_index][record.chosen_index];
  }
  return table;
}

std::string ConfusionCsv(const ConfusionTable& table,
                         const std::vector<std::string>& class_names) {
  std::string out = "gold,predicted,count\n";
  for (const auto& [gold, predicted] : table.rows) {
    for (const auto& [label, count] : predicted) {
      StrAppend(&out, CsvField(ClassName(class_names, gold)), ",",
                      CsvField(ClassName(class_names, label)), ",", count,
                      "\n");
    }
  }
  return out;
}

std::string ConfusionMarkdown(const ConfusionTable& table,
                              const std::vector<std::string>& class_names) {
  std::vector<std::string> header = {"Gold \\ Predicted"};
  for (int c = 0; c < table.num_classes; ++c) {
    header.push_back(ClassName(class_names, c));
  }
  header.push_back("Errors");
  std::vector<bool> right_align(header.size(), true);
  right_align[0] = false;
  std::vector<std::vector<std::string>> rows;
  for (const auto& [gold, predicted] : table.rows) {
    std::vector<std::string> row = {ClassName(class_names, gold)};
    int errors = 0;
    for (int c = 0; c < table.num_classes; ++c) {
      auto it = predicted.find(c);
      const int count = it == predicted.end() ? 0 : it->second;
      errors += count;
      row.push_back(c == gold ? "--" : StrCat(count));
    }
    row.push_back(StrCat(errors));
    rows.push_back(std::move(row));
  }
  return MarkdownTable(header, rows, right_align);
}

}  // namespace ragcal
