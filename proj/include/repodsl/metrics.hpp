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

// Scoring of predicted project snapshots against targets.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "repodsl/repofs.hpp"

namespace repodsl::metrics {

struct MetricConfig {
  double alpha = 5.0;
  double w_max = 20.0;
  int bleu_max_n = 4;
  double bleu_smoothing = 1e-9;

  // Throws ValidationError unless alpha > 0, w_max > 0, bleu_max_n >= 1 and
  // bleu_smoothing >= 0.
  void Validate() const;
};

enum class ChangeKind { kInsert, kReplace, kDelete };

std::string_view ChangeKindName(ChangeKind kind);

// One expected edit and how the prediction fared on it.
struct ChangedLine {
  std::string key;
  ChangeKind kind;
  std::string true_content;
  std::optional<std::string> pred_content;
  double e = 1.0;
  double s_line = 0.0;
  double weight = 0.0;
};

struct ChangeScore {
  std::vector<ChangedLine> lines;
  double average = 0.0;
};

struct StructScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// (1 - e)^alpha with 1 - e clamped to [0, 1].
double LineScore(double e, double alpha);

// min(ln(1 + code points of `true_content`), w_max).
double LineWeight(std::string_view true_content, double w_max);

// Number of Unicode code points in UTF-8 text.
size_t CharLength(std::string_view text);

// 1 when the trees are identical, empty folders included.
int ExactMatch(const repofs::RepoSnapshot& target,
               const repofs::RepoSnapshot& prediction);

// Scores only the lines that change between context and target.
//
// Per flattened key, the context -> target line diff yields the changed
// lines. Inside a replace block lines pair up positionally; surplus target
// lines count as inserts and surplus context lines as deletes. Each
// inserted/replaced target line is then located in the prediction through
// the target -> prediction line diff: equal means e = 0, a positional pair
// inside a replace block gives the normalized token error, and no
// counterpart gives e = 1. A deleted context line scores e = 0 when the
// context -> prediction diff drops it as well, else e = 1.
//
// With no changed lines the score is 1.0 on exact match and 0.0 otherwise.
// If every weight is zero the unweighted mean of s_line is used.
ChangeScore ChangeSimilarity(const repofs::RepoSnapshot& context,
                             const repofs::RepoSnapshot& target,
                             const repofs::RepoSnapshot& prediction,
                             const MetricConfig& cfg = {});

// Precision/recall/F1 over folder and file paths.
StructScore StructuralFidelity(const repofs::RepoSnapshot& target,
                               const repofs::RepoSnapshot& prediction);

// Set arithmetic behind StructuralFidelity; exposed for property tests.
StructScore PathSetScore(std::span<const std::string> true_paths,
                         std::span<const std::string> pred_paths);

// Single-reference BLEU over whitespace-separated tokens.
double Bleu(std::string_view reference, std::string_view candidate,
            const MetricConfig& cfg = {});

int Validity(std::string_view raw_output);

// Best-effort recovery of a document wrapped in other text: strict parse
// first, then the span from the first '{' to the last '}'.
std::optional<repofs::RepoSnapshot> RepairParse(std::string_view raw_output);

struct ExampleRecord {
  std::string id;
  int exact_match = 0;
  int valid = 0;
  double bleu = 0.0;
  double change_similarity = 0.0;
  double structural_fidelity = 0.0;
  bool repaired = false;
  std::string error;  // empty unless generation failed
};

ExampleRecord EvaluateExample(std::string id,
                              const repofs::RepoSnapshot& context,
                              const repofs::RepoSnapshot& target,
                              std::string_view raw_prediction,
                              const MetricConfig& cfg = {});

struct MetricMeans {
  double exact_match = 0.0;
  double valid = 0.0;
  double bleu = 0.0;
  double change_similarity = 0.0;
  double structural_fidelity = 0.0;
};

struct MetricReport {
  std::vector<ExampleRecord> records;  // sorted by id
  MetricMeans means;
};

// Sorts by id and averages. Throws UsageError on empty input.
MetricReport Aggregate(std::vector<ExampleRecord> records);

}  // namespace repodsl::metrics
