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

#include "repodsl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "repodsl/error.hpp"

namespace repodsl::dataset {
namespace fs = std::filesystem;
using nlohmann::json;
using repofs::Folder;
using repofs::Node;
using repofs::RepoSnapshot;

namespace {

constexpr std::pair<Operation, std::string_view> kOperationNames[] = {
    {Operation::kCreate, "create"},
    {Operation::kAddAttribute, "add_attribute"},
    {Operation::kAddProduct, "add_product"},
    {Operation::kDeleteAttribute, "delete_attribute"},
    {Operation::kDeleteProduct, "delete_product"},
};

// Uniform integer in [0, bound) from the raw 64-bit stream. Written out so
// shuffles are identical across standard library implementations.
uint64_t UniformBelow(std::mt19937_64& rng, uint64_t bound) {
  const uint64_t max = std::numeric_limits<uint64_t>::max();
  const uint64_t limit = max - max % bound;
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

std::string NormalizePrefix(std::string prefix) {
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  while (!prefix.empty() && prefix.front() == '/') prefix.erase(prefix.begin());
  return prefix;
}

bool Covered(const std::string& path, const std::vector<std::string>& keep) {
  for (const std::string& p : keep) {
    if (path == p) return true;
    if (path.size() > p.size() && path.compare(0, p.size(), p) == 0 &&
        path[p.size()] == '/') {
      return true;
    }
  }
  return false;
}

bool LeadsTo(const std::string& path, const std::vector<std::string>& keep) {
  const std::string dir = path + "/";
  return std::any_of(keep.begin(), keep.end(), [&](const std::string& p) {
    return p.compare(0, dir.size(), dir) == 0;
  });
}

Folder FilterFolder(const Folder& folder, const std::string& prefix,
                    const std::vector<std::string>& keep) {
  Folder out;
  for (const auto& [name, node] : folder) {
    const std::string path = prefix.empty() ? name : prefix + "/" + name;
    if (Covered(path, keep)) {
      out.emplace(name, node);
    } else if (node.is_folder() && LeadsTo(path, keep)) {
      Folder sub = FilterFolder(node.folder(), path, keep);
      if (!sub.empty()) out.emplace(name, std::move(sub));
    }
  }
  return out;
}

std::string RenderTemplate(std::string_view tmpl, std::string_view instruction,
                           std::string_view context) {
  std::string out;
  size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl.substr(i, kInstructionSlot.size()) == kInstructionSlot) {
      out.append(instruction);
      i += kInstructionSlot.size();
    } else if (tmpl.substr(i, kContextSlot.size()) == kContextSlot) {
      out.append(context);
      i += kContextSlot.size();
    } else {
      out.push_back(tmpl[i++]);
    }
  }
  return out;
}

const json& Field(const json& record, const char* name, json::value_t type) {
  auto it = record.find(name);
  if (it == record.end()) throw SchemaError(std::string("missing field '") + name + "'");
  if (it->type() != type) throw SchemaError(std::string("field '") + name + "' has the wrong type");
  return *it;
}

size_t LineCount(const RepoSnapshot& snapshot) {
  size_t n = 0;
  for (const auto& [path, content] : repofs::Flatten(snapshot)) {
    n += repofs::SplitLines(content).size();
  }
  return n;
}

}  // namespace

std::string_view VariantName(Variant v) {
  return v == Variant::kFull ? "full" : "minimal";
}

std::string_view OperationName(Operation op) {
  for (const auto& [value, name] : kOperationNames) {
    if (value == op) return name;
  }
  return "?";
}

Variant ParseVariant(std::string_view name) {
  if (name == "full") return Variant::kFull;
  if (name == "minimal") return Variant::kMinimal;
  throw ValidationError("unknown variant '" + std::string(name) + "'");
}

Operation ParseOperation(std::string_view name) {
  for (const auto& [value, n] : kOperationNames) {
    if (n == name) return value;
  }
  throw ValidationError("unknown operation '" + std::string(name) +
                        "' (expected create, add_attribute, add_product, "
                        "delete_attribute or delete_product)");
}

std::string ExampleId(std::string_view group_id, Variant variant) {
  return std::string(group_id) + ":" + std::string(VariantName(variant));
}

std::set<std::string> ChangedKeys(const EvalExample& example) {
  const repofs::FlatView ctx = repofs::Flatten(example.context);
  const repofs::FlatView tgt = repofs::Flatten(example.target);
  std::set<std::string> changed;
  for (const auto& [key, content] : ctx) {
    auto it = tgt.find(key);
    if (it == tgt.end() || it->second != content) changed.insert(key);
  }
  for (const auto& [key, content] : tgt) {
    if (!ctx.contains(key)) changed.insert(key);
  }
  return changed;
}

BuildResult BuildExample(std::string instruction, const fs::path& context_dir,
                         const fs::path& target_dir, Operation operation,
                         std::string group_id) {
  if (group_id.empty()) throw ValidationError("group id must not be empty");
  BuildResult result;
  EvalExample& ex = result.example;
  ex.context = repofs::Linearize(context_dir);
  ex.target = repofs::Linearize(target_dir);
  ex.instruction = std::move(instruction);
  ex.operation = operation;
  ex.variant = Variant::kFull;
  ex.id = ExampleId(group_id, ex.variant);
  ex.group_id = std::move(group_id);
  if (ex.context == ex.target) {
    result.warnings.push_back("empty change-set: context and target are identical");
  }
  if (ex.instruction.empty()) result.warnings.push_back("empty instruction");
  return result;
}

EvalExample MinimalVariant(const EvalExample& example,
                           const std::vector<std::string>& keep) {
  std::vector<std::string> prefixes;
  for (const std::string& p : keep) {
    std::string n = NormalizePrefix(p);
    if (n.empty()) throw ValidationError("empty keep prefix");
    prefixes.push_back(std::move(n));
  }
  std::vector<std::string> missing;
  for (const std::string& key : ChangedKeys(example)) {
    if (!Covered(key, prefixes)) missing.push_back(key);
  }
  if (!missing.empty()) {
    std::string msg = "keep prefixes drop changed keys:";
    for (const std::string& k : missing) msg += " " + k;
    throw ValidationError(msg);
  }
  EvalExample out = example;
  out.variant = Variant::kMinimal;
  out.id = ExampleId(example.group_id, Variant::kMinimal);
  out.context.root = FilterFolder(example.context.root, "", prefixes);
  out.target.root = FilterFolder(example.target.root, "", prefixes);
  return out;
}

json SplitResult::Manifest() const {
  return json{{"schema_version", kSchemaVersion},
              {"seed", seed},
              {"train_ratio", train_ratio},
              {"eval_ratio", eval_ratio},
              {"achieved_eval_ratio", achieved_eval_ratio},
              {"deviation", deviation},
              {"train_examples", train.size()},
              {"eval_examples", eval.size()},
              {"groups", assignment}};
}

SplitResult GroupedSplit(const std::vector<EvalExample>& examples,
                         double train_ratio, double eval_ratio, uint64_t seed) {
  if (!(train_ratio > 0.0) || !(eval_ratio > 0.0) ||
      std::abs(train_ratio + eval_ratio - 1.0) > 1e-9) {
    throw ValidationError("split ratios must be positive and sum to 1");
  }
  std::map<std::string, size_t> group_sizes;
  for (const EvalExample& ex : examples) ++group_sizes[ex.group_id];
  if (group_sizes.size() < 2) {
    throw ValidationError("grouped split needs at least 2 groups, got " +
                          std::to_string(group_sizes.size()));
  }

  std::vector<std::pair<std::string, size_t>> groups(group_sizes.begin(), group_sizes.end());
  std::mt19937_64 rng(seed);
  for (size_t i = groups.size() - 1; i > 0; --i) {
    std::swap(groups[i], groups[UniformBelow(rng, i + 1)]);
  }
  std::stable_sort(groups.begin(), groups.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  const auto total = static_cast<double>(examples.size());
  const double train_target = train_ratio * total;
  const double eval_target = eval_ratio * total;
  size_t train_count = 0, eval_count = 0;
  std::map<std::string, bool> to_eval;
  for (const auto& [gid, size] : groups) {
    const double train_deficit = train_target - static_cast<double>(train_count);
    const double eval_deficit = eval_target - static_cast<double>(eval_count);
    const bool eval = eval_deficit > train_deficit;
    to_eval[gid] = eval;
    (eval ? eval_count : train_count) += size;
  }
  // Both sides must be non-empty; move the last (smallest) group over.
  for (bool need_eval : {true, false}) {
    if ((need_eval ? eval_count : train_count) != 0) continue;
    for (auto it = groups.rbegin(); it != groups.rend(); ++it) {
      if (to_eval[it->first] != need_eval) {
        to_eval[it->first] = need_eval;
        (need_eval ? eval_count : train_count) += it->second;
        (need_eval ? train_count : eval_count) -= it->second;
        break;
      }
    }
  }

  SplitResult result;
  result.seed = seed;
  result.train_ratio = train_ratio;
  result.eval_ratio = eval_ratio;
  for (const EvalExample& ex : examples) {
    (to_eval[ex.group_id] ? result.eval : result.train).push_back(ex);
  }
  for (const auto& [gid, eval] : to_eval) result.assignment[gid] = eval ? "eval" : "train";
  result.achieved_eval_ratio = static_cast<double>(result.eval.size()) / total;
  result.deviation = std::abs(result.achieved_eval_ratio - eval_ratio);
  return result;
}

std::vector<int32_t> WhitespaceCodec::Encode(std::string_view text) {
  std::vector<int32_t> ids;
  size_t i = 0;
  while (i < text.size()) {
    const bool space = IsSpace(text[i]);
    size_t j = i + 1;
    while (j < text.size() && IsSpace(text[j]) == space) ++j;
    std::string_view piece = text.substr(i, j - i);
    auto it = ids_.find(piece);
    if (it == ids_.end()) {
      it = ids_.emplace(std::string(piece), static_cast<int32_t>(vocab_.size())).first;
      vocab_.emplace_back(piece);
    }
    ids.push_back(it->second);
    i = j;
  }
  return ids;
}

std::string WhitespaceCodec::Decode(std::span<const int32_t> ids) const {
  std::string out;
  for (int32_t id : ids) {
    if (id < 0 || static_cast<size_t>(id) >= vocab_.size()) {
      throw ValidationError("token id out of range: " + std::to_string(id));
    }
    out += vocab_[static_cast<size_t>(id)];
  }
  return out;
}

std::vector<int32_t> ByteCodec::Encode(std::string_view text) {
  std::vector<int32_t> ids;
  ids.reserve(text.size());
  for (char c : text) ids.push_back(static_cast<unsigned char>(c));
  return ids;
}

std::string ByteCodec::Decode(std::span<const int32_t> ids) const {
  std::string out;
  out.reserve(ids.size());
  for (int32_t id : ids) {
    if (id < 0 || id > 255) throw ValidationError("byte token out of range: " + std::to_string(id));
    out.push_back(static_cast<char>(id));
  }
  return out;
}

std::unique_ptr<TokenCodec> MakeCodec(std::string_view name) {
  if (name == "whitespace") return std::make_unique<WhitespaceCodec>();
  if (name == "byte") return std::make_unique<ByteCodec>();
  throw ValidationError("unknown codec '" + std::string(name) + "' (expected whitespace or byte)");
}

std::vector<int32_t> SftRecord::Labels() const {
  std::vector<int32_t> labels = input_ids;
  std::fill(labels.begin(),
            labels.begin() + static_cast<std::ptrdiff_t>(std::min(mask_boundary, labels.size())),
            kIgnoreLabel);
  return labels;
}

json SftRecord::ToJson(bool with_ids) const {
  json j{{"schema_version", kSchemaVersion},
         {"id", id},
         {"rendered_prompt", rendered_prompt},
         {"rendered_target", rendered_target},
         {"mask_boundary", mask_boundary},
         {"prompt_tokens", prompt_tokens},
         {"target_tokens", target_tokens}};
  if (with_ids) {
    j["input_ids"] = input_ids;
    j["labels"] = Labels();
  }
  return j;
}

void ValidateTemplate(std::string_view prompt_template) {
  if (prompt_template.find(kInstructionSlot) == std::string_view::npos) {
    throw ValidationError("prompt template lacks the {instruction} placeholder");
  }
  if (prompt_template.find(kContextSlot) == std::string_view::npos) {
    throw ValidationError("prompt template lacks the {context} placeholder");
  }
}

SftRecord RenderSft(const EvalExample& example, std::string_view prompt_template,
                    TokenCodec& codec) {
  ValidateTemplate(prompt_template);
  SftRecord rec;
  rec.id = example.id;
  rec.rendered_prompt = RenderTemplate(prompt_template, example.instruction,
                                       repofs::CanonicalSerialize(example.context));
  rec.rendered_target = repofs::CanonicalSerialize(example.target);

  const std::vector<int32_t> prompt_ids = codec.Encode(rec.rendered_prompt);
  rec.input_ids = codec.Encode(rec.rendered_prompt + rec.rendered_target);
  rec.mask_boundary = prompt_ids.size();
  if (rec.mask_boundary > rec.input_ids.size()) {
    throw AlignmentError(example.id + ": prompt encodes longer than prompt+target");
  }
  std::span<const int32_t> all(rec.input_ids);
  if (codec.Decode(all.first(rec.mask_boundary)) != rec.rendered_prompt) {
    throw AlignmentError(example.id + ": tokens before the mask boundary do not decode to the prompt (" +
                         std::string(codec.Name()) + " codec merges across the template end)");
  }
  if (codec.Decode(all.subspan(rec.mask_boundary)) != rec.rendered_target) {
    throw AlignmentError(example.id + ": tokens after the mask boundary do not decode to the target");
  }
  rec.prompt_tokens = rec.mask_boundary;
  rec.target_tokens = rec.input_ids.size() - rec.mask_boundary;
  return rec;
}

json CorpusStats::ToJson() const {
  return json{{"example_count", example_count},
              {"mean_context_lines", mean_context_lines},
              {"mean_target_lines", mean_target_lines},
              {"mean_files", mean_files},
              {"mean_folders", mean_folders},
              {"variant_ratio", variant_ratio}};
}

CorpusStats ComputeCorpusStats(const std::vector<EvalExample>& examples) {
  if (examples.empty()) throw UsageError("corpus is empty");
  CorpusStats s;
  s.example_count = examples.size();
  size_t minimal = 0;
  for (const EvalExample& ex : examples) {
    s.mean_context_lines += static_cast<double>(LineCount(ex.context));
    s.mean_target_lines += static_cast<double>(LineCount(ex.target));
    std::set<std::string> files, folders;
    for (const auto* snap : {&ex.context, &ex.target}) {
      for (const auto& [path, content] : repofs::Flatten(*snap)) files.insert(path);
      for (std::string& f : repofs::FolderPaths(*snap)) folders.insert(std::move(f));
    }
    s.mean_files += static_cast<double>(files.size());
    s.mean_folders += static_cast<double>(folders.size());
    if (ex.variant == Variant::kMinimal) ++minimal;
  }
  const auto n = static_cast<double>(examples.size());
  s.mean_context_lines /= n;
  s.mean_target_lines /= n;
  s.mean_files /= n;
  s.mean_folders /= n;
  s.variant_ratio = static_cast<double>(minimal) / n;
  return s;
}

json ExampleToJson(const EvalExample& example) {
  return json{{"schema_version", kSchemaVersion},
              {"id", example.id},
              {"group_id", example.group_id},
              {"instruction", example.instruction},
              {"operation", OperationName(example.operation)},
              {"variant", VariantName(example.variant)},
              {"context", repofs::SnapshotToJson(example.context)},
              {"target", repofs::SnapshotToJson(example.target)}};
}

EvalExample ExampleFromJson(const json& record) {
  if (!record.is_object()) throw SchemaError("example record must be an object");
  const json& version = Field(record, "schema_version", json::value_t::number_unsigned);
  if (version.get<int>() != kSchemaVersion) {
    throw SchemaError("unsupported schema_version " + version.dump());
  }
  EvalExample ex;
  ex.id = Field(record, "id", json::value_t::string).get<std::string>();
  ex.group_id = Field(record, "group_id", json::value_t::string).get<std::string>();
  ex.instruction = Field(record, "instruction", json::value_t::string).get<std::string>();
  try {
    ex.operation = ParseOperation(Field(record, "operation", json::value_t::string).get<std::string>());
    ex.variant = ParseVariant(Field(record, "variant", json::value_t::string).get<std::string>());
  } catch (const ValidationError& e) {
    throw SchemaError(e.what());
  }
  if (ex.id.empty() || ex.group_id.empty()) throw SchemaError("id and group_id must be non-empty");
  ex.context = repofs::SnapshotFromJson(Field(record, "context", json::value_t::object));
  ex.target = repofs::SnapshotFromJson(Field(record, "target", json::value_t::object));
  return ex;
}

std::vector<EvalExample> LoadCorpus(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file: " + path.string());
  std::vector<EvalExample> examples;
  std::set<std::string> ids;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SyntaxError(where + e.what());
    }
    try {
      examples.push_back(ExampleFromJson(record));
    } catch (const SchemaError& e) {
      throw SchemaError(where + e.what());
    }
    if (!ids.insert(examples.back().id).second) {
      throw ValidationError(where + "duplicate example id '" + examples.back().id + "'");
    }
  }
  if (in.bad()) throw IoError("cannot read corpus file: " + path.string());
  return examples;
}

std::string CorpusText(const std::vector<EvalExample>& examples) {
  std::string out;
  for (const EvalExample& ex : examples) {
    out += ExampleToJson(ex).dump();
    out += '\n';
  }
  return out;
}

void SaveCorpus(const std::vector<EvalExample>& examples, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  const std::string text = CorpusText(examples);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("cannot write corpus file: " + path.string());
}

}  // namespace repodsl::dataset
