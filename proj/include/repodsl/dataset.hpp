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

// Task triples, minimal-context variants, grouped splits, corpus statistics
// and supervised fine-tuning records.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "repodsl/repofs.hpp"

namespace repodsl::dataset {

inline constexpr int kSchemaVersion = 1;

enum class Variant { kFull, kMinimal };
enum class Operation {
  kCreate,
  kAddAttribute,
  kAddProduct,
  kDeleteAttribute,
  kDeleteProduct,
};

std::string_view VariantName(Variant v);
std::string_view OperationName(Operation op);
// Throw ValidationError on unknown names.
Variant ParseVariant(std::string_view name);
Operation ParseOperation(std::string_view name);

struct EvalExample {
  std::string id;
  std::string group_id;
  std::string instruction;
  repofs::RepoSnapshot context;
  repofs::RepoSnapshot target;
  Variant variant = Variant::kFull;
  Operation operation = Operation::kCreate;

  friend bool operator==(const EvalExample&, const EvalExample&) = default;
};

std::string ExampleId(std::string_view group_id, Variant variant);

// Flattened keys whose content differs between context and target, plus
// keys present on one side only.
std::set<std::string> ChangedKeys(const EvalExample& example);

struct BuildResult {
  EvalExample example;
  std::vector<std::string> warnings;
};

// Linearizes both directories; failures propagate as IoError/EncodingError.
BuildResult BuildExample(std::string instruction,
                         const std::filesystem::path& context_dir,
                         const std::filesystem::path& target_dir,
                         Operation operation, std::string group_id);

// Keeps only paths equal to or below one of `keep`. Throws ValidationError
// listing every changed key the prefixes would drop.
EvalExample MinimalVariant(const EvalExample& example,
                           const std::vector<std::string>& keep);

struct SplitResult {
  std::vector<EvalExample> train;
  std::vector<EvalExample> eval;
  std::map<std::string, std::string> assignment;  // group_id -> "train"/"eval"
  uint64_t seed = 0;
  double train_ratio = 0.0;
  double eval_ratio = 0.0;
  double achieved_eval_ratio = 0.0;
  double deviation = 0.0;  // |achieved - requested| eval fraction

  nlohmann::json Manifest() const;
};

// Whole groups are shuffled with the seed, ordered largest first (stable),
// and each goes to the split furthest below its example-count target.
// Throws ValidationError on bad ratios or fewer than two groups.
SplitResult GroupedSplit(const std::vector<EvalExample>& examples,
                         double train_ratio, double eval_ratio, uint64_t seed);

// Reversible text <-> token id codec.
class TokenCodec {
 public:
  virtual ~TokenCodec() = default;
  virtual std::vector<int32_t> Encode(std::string_view text) = 0;
  virtual std::string Decode(std::span<const int32_t> ids) const = 0;
  virtual std::string_view Name() const = 0;
};

// Maximal runs of whitespace and of non-whitespace are tokens; ids are
// assigned in order of first appearance. Not thread-safe.
class WhitespaceCodec : public TokenCodec {
 public:
  std::vector<int32_t> Encode(std::string_view text) override;
  std::string Decode(std::span<const int32_t> ids) const override;
  std::string_view Name() const override { return "whitespace"; }

 private:
  std::map<std::string, int32_t, std::less<>> ids_;
  std::vector<std::string> vocab_;
};

// One token per byte.
class ByteCodec : public TokenCodec {
 public:
  std::vector<int32_t> Encode(std::string_view text) override;
  std::string Decode(std::span<const int32_t> ids) const override;
  std::string_view Name() const override { return "byte"; }
};

// Throws ValidationError on an unknown name.
std::unique_ptr<TokenCodec> MakeCodec(std::string_view name);

inline constexpr int32_t kIgnoreLabel = -100;

struct SftRecord {
  std::string id;
  std::string rendered_prompt;
  std::string rendered_target;
  size_t mask_boundary = 0;
  size_t prompt_tokens = 0;
  size_t target_tokens = 0;
  std::vector<int32_t> input_ids;

  // input_ids with every position before mask_boundary set to kIgnoreLabel.
  std::vector<int32_t> Labels() const;

  nlohmann::json ToJson(bool with_ids) const;
};

// Template placeholders.
inline constexpr std::string_view kInstructionSlot = "{instruction}";
inline constexpr std::string_view kContextSlot = "{context}";

// Throws ValidationError unless both placeholders are present.
void ValidateTemplate(std::string_view prompt_template);

// Renders the prompt and target, encodes prompt+target as one sequence and
// checks that the first prompt_tokens ids decode to exactly the prompt and
// the rest to exactly the target. Throws AlignmentError otherwise.
SftRecord RenderSft(const EvalExample& example,
                    std::string_view prompt_template, TokenCodec& codec);

struct CorpusStats {
  size_t example_count = 0;
  double mean_context_lines = 0.0;
  double mean_target_lines = 0.0;
  double mean_files = 0.0;
  double mean_folders = 0.0;
  double variant_ratio = 0.0;  // minimal / total

  nlohmann::json ToJson() const;
};

// Line means count raw file lines. Files and folders are counted over the
// union of context and target paths. Throws UsageError on empty input.
CorpusStats ComputeCorpusStats(const std::vector<EvalExample>& examples);

nlohmann::json ExampleToJson(const EvalExample& example);
// Throws SchemaError on a malformed record.
EvalExample ExampleFromJson(const nlohmann::json& record);

// One record per line, blank lines skipped. Load throws IoError,
// SyntaxError/SchemaError naming the line, or ValidationError on a
// duplicate id.
std::vector<EvalExample> LoadCorpus(const std::filesystem::path& path);
void SaveCorpus(const std::vector<EvalExample>& examples,
                const std::filesystem::path& path);
std::string CorpusText(const std::vector<EvalExample>& examples);

}  // namespace repodsl::dataset
