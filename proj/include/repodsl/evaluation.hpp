// Copyright 2026 The repodsl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Corpus-level scoring and the report file formats.

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "repodsl/dataset.hpp"
#include "repodsl/metrics.hpp"

namespace repodsl::evaluation {

nlohmann::json RecordToJson(const metrics::ExampleRecord& record);

// One record per line, ordered by example id.
std::string RecordsJsonl(const metrics::MetricReport& report);

struct SummaryRow {
  std::string model;
  std::string setting;
  size_t examples = 0;
  metrics::MetricMeans means;
};

SummaryRow MakeSummary(const metrics::MetricReport& report, std::string model,
                       std::string setting);
nlohmann::json SummaryToJson(const SummaryRow& row);
// Throws SchemaError.
SummaryRow SummaryFromJson(const nlohmann::json& doc);

// Column order of the published results table.
inline constexpr const char* kTableColumns[] = {
    "Model", "Setting", "EM", "JSON", "BLEU", "Change Similar.", "Struct. Fidelity"};

// Aligned plain-text table, means rounded to 3 decimals.
std::string RenderTable(const std::vector<SummaryRow>& rows);

// {"id": ..., "output": ...} per line. Throws IoError, SyntaxError,
// SchemaError, or ValidationError on a duplicate id.
std::map<std::string, std::string> LoadPredictions(const std::filesystem::path& path);

// Scores each example against predictions[id] using up to `jobs` threads.
// Throws ValidationError listing ids missing from, or unknown to, the
// corpus.
metrics::MetricReport EvaluateCorpus(
    const std::vector<dataset::EvalExample>& corpus,
    const std::map<std::string, std::string>& predictions,
    const metrics::MetricConfig& cfg, int jobs = 1);

// Runs fn(i) for i in [0, count) on up to `jobs` worker threads.
void ParallelFor(size_t count, int jobs, const std::function<void(size_t)>& fn);

}  // namespace repodsl::evaluation
