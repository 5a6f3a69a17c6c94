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

#include "repodsl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "repodsl/diffcore.hpp"
#include "repodsl/error.hpp"

namespace repodsl::metrics {
namespace {

using repofs::FlatView;
using repofs::RepoSnapshot;

std::vector<std::string> LinesAt(const FlatView& flat, const std::string& key) {
  auto it = flat.find(key);
  if (it == flat.end()) return {};
  return repofs::SplitLines(it->second);
}

// Where each target line ended up in the prediction.
struct TargetAlignment {
  enum class State { kUnchanged, kPaired, kMissing };
  std::vector<State> state;
  std::vector<size_t> pred_index;
};

TargetAlignment AlignTarget(const std::vector<std::string>& target,
                            const std::vector<std::string>& prediction) {
  TargetAlignment out;
  out.state.assign(target.size(), TargetAlignment::State::kMissing);
  out.pred_index.assign(target.size(), 0);
  for (const diff::Opcode& op : diff::LineDiff(target, prediction).opcodes) {
    if (op.tag == diff::OpTag::kEqual) {
      for (size_t k = 0; k < op.a_end - op.a_start; ++k) {
        out.state[op.a_start + k] = TargetAlignment::State::kUnchanged;
        out.pred_index[op.a_start + k] = op.b_start + k;
      }
    } else if (op.tag == diff::OpTag::kReplace) {
      size_t n = std::min(op.a_end - op.a_start, op.b_end - op.b_start);
      for (size_t k = 0; k < n; ++k) {
        out.state[op.a_start + k] = TargetAlignment::State::kPaired;
        out.pred_index[op.a_start + k] = op.b_start + k;
      }
    }
  }
  return out;
}

// True for every context line the context -> prediction diff keeps.
std::vector<bool> RetainedLines(const std::vector<std::string>& context,
                                const std::vector<std::string>& prediction) {
  std::vector<bool> kept(context.size(), false);
  for (const diff::Opcode& op : diff::LineDiff(context, prediction).opcodes) {
    if (op.tag != diff::OpTag::kEqual) continue;
    for (size_t i = op.a_start; i < op.a_end; ++i) kept[i] = true;
  }
  return kept;
}

std::vector<std::string_view> SplitWhitespace(std::string_view text) {
  std::vector<std::string_view> tokens;
  size_t i = 0;
  auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
           c == '\f';
  };
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) tokens.push_back(text.substr(start, i - start));
  }
  return tokens;
}

using NGramCounts = std::map<std::vector<std::string_view>, size_t>;

NGramCounts CountNGrams(const std::vector<std::string_view>& tokens, size_t n) {
  NGramCounts counts;
  if (tokens.size() < n) return counts;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string_view>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                           tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

}  // namespace

void MetricConfig::Validate() const {
  if (!(alpha > 0.0)) throw ValidationError("alpha must be > 0");
  if (!(w_max > 0.0)) throw ValidationError("w_max must be > 0");
  if (bleu_max_n < 1) throw ValidationError("bleu_max_n must be >= 1");
  if (!(bleu_smoothing >= 0.0)) throw ValidationError("bleu_smoothing must be >= 0");
}

std::string_view ChangeKindName(ChangeKind kind) {
  switch (kind) {
    case ChangeKind::kInsert: return "insert";
    case ChangeKind::kReplace: return "replace";
    case ChangeKind::kDelete: return "delete";
  }
  return "?";
}

double LineScore(double e, double alpha) {
  return std::pow(std::clamp(1.0 - e, 0.0, 1.0), alpha);
}

size_t CharLength(std::string_view text) {
  return static_cast<size_t>(std::count_if(text.begin(), text.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

double LineWeight(std::string_view true_content, double w_max) {
  return std::min(std::log1p(static_cast<double>(CharLength(true_content))), w_max);
}

int ExactMatch(const RepoSnapshot& target, const RepoSnapshot& prediction) {
  return target == prediction ? 1 : 0;
}

ChangeScore ChangeSimilarity(const RepoSnapshot& context,
                             const RepoSnapshot& target,
                             const RepoSnapshot& prediction,
                             const MetricConfig& cfg) {
  cfg.Validate();
  const FlatView ctx = repofs::Flatten(context);
  const FlatView tgt = repofs::Flatten(target);
  const FlatView pred = repofs::Flatten(prediction);

  std::set<std::string> keys;
  for (const auto& [k, v] : ctx) keys.insert(k);
  for (const auto& [k, v] : tgt) keys.insert(k);

  ChangeScore score;
  for (const std::string& key : keys) {
    const std::vector<std::string> c_lines = LinesAt(ctx, key);
    const std::vector<std::string> t_lines = LinesAt(tgt, key);
    if (c_lines == t_lines) continue;
    const std::vector<std::string> p_lines = LinesAt(pred, key);

    std::vector<std::pair<size_t, ChangeKind>> target_changes;
    std::vector<size_t> deleted;
    for (const diff::Opcode& op : diff::LineDiff(c_lines, t_lines).opcodes) {
      const size_t a_len = op.a_end - op.a_start;
      const size_t b_len = op.b_end - op.b_start;
      switch (op.tag) {
        case diff::OpTag::kEqual:
          break;
        case diff::OpTag::kInsert:
          for (size_t j = op.b_start; j < op.b_end; ++j) {
            target_changes.emplace_back(j, ChangeKind::kInsert);
          }
          break;
        case diff::OpTag::kDelete:
          for (size_t i = op.a_start; i < op.a_end; ++i) deleted.push_back(i);
          break;
        case diff::OpTag::kReplace: {
          const size_t n = std::min(a_len, b_len);
          for (size_t k = 0; k < b_len; ++k) {
            target_changes.emplace_back(
                op.b_start + k, k < n ? ChangeKind::kReplace : ChangeKind::kInsert);
          }
          for (size_t k = n; k < a_len; ++k) deleted.push_back(op.a_start + k);
          break;
        }
      }
    }

    if (!target_changes.empty()) {
      const TargetAlignment align = AlignTarget(t_lines, p_lines);
      for (const auto& [j, kind] : target_changes) {
        ChangedLine line{key, kind, t_lines[j], std::nullopt};
        switch (align.state[j]) {
          case TargetAlignment::State::kUnchanged:
            line.pred_content = p_lines[align.pred_index[j]];
            line.e = 0.0;
            break;
          case TargetAlignment::State::kPaired:
            line.pred_content = p_lines[align.pred_index[j]];
            line.e = diff::NormalizedLineError(t_lines[j], *line.pred_content);
            break;
          case TargetAlignment::State::kMissing:
            line.e = 1.0;
            break;
        }
        score.lines.push_back(std::move(line));
      }
    }
    if (!deleted.empty()) {
      const std::vector<bool> kept = RetainedLines(c_lines, p_lines);
      for (size_t i : deleted) {
        ChangedLine line{key, ChangeKind::kDelete, c_lines[i], std::nullopt};
        if (kept[i]) line.pred_content = c_lines[i];
        line.e = kept[i] ? 1.0 : 0.0;
        score.lines.push_back(std::move(line));
      }
    }
  }

  if (score.lines.empty()) {
    score.average = ExactMatch(target, prediction) ? 1.0 : 0.0;
    return score;
  }

  double weighted = 0.0, total_weight = 0.0, plain = 0.0;
  for (ChangedLine& line : score.lines) {
    line.s_line = LineScore(line.e, cfg.alpha);
    line.weight = LineWeight(line.true_content, cfg.w_max);
    weighted += line.s_line * line.weight;
    total_weight += line.weight;
    plain += line.s_line;
  }
  score.average = total_weight > 0.0
                      ? weighted / total_weight
                      : plain / static_cast<double>(score.lines.size());
  return score;
}

StructScore PathSetScore(std::span<const std::string> true_paths,
                         std::span<const std::string> pred_paths) {
  const std::set<std::string> k_true(true_paths.begin(), true_paths.end());
  const std::set<std::string> k_pred(pred_paths.begin(), pred_paths.end());
  if (k_true.empty() && k_pred.empty()) return {1.0, 1.0, 1.0};
  size_t common = 0;
  for (const std::string& p : k_pred) common += k_true.count(p);
  StructScore s;
  s.precision = k_pred.empty() ? 0.0 : static_cast<double>(common) / static_cast<double>(k_pred.size());
  s.recall = k_true.empty() ? 0.0 : static_cast<double>(common) / static_cast<double>(k_true.size());
  s.f1 = s.precision + s.recall > 0.0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  return s;
}

StructScore StructuralFidelity(const RepoSnapshot& target,
                               const RepoSnapshot& prediction) {
  return PathSetScore(repofs::AllPaths(target), repofs::AllPaths(prediction));
}

double Bleu(std::string_view reference, std::string_view candidate,
            const MetricConfig& cfg) {
  cfg.Validate();
  const auto ref = SplitWhitespace(reference);
  const auto cand = SplitWhitespace(candidate);
  if (cand.empty()) return ref.empty() ? 1.0 : 0.0;

  const size_t max_n = std::min(static_cast<size_t>(cfg.bleu_max_n), cand.size());
  double log_sum = 0.0;
  for (size_t n = 1; n <= max_n; ++n) {
    const NGramCounts cand_counts = CountNGrams(cand, n);
    const NGramCounts ref_counts = CountNGrams(ref, n);
    size_t matches = 0;
    for (const auto& [gram, count] : cand_counts) {
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matches += std::min(count, it->second);
    }
    const double total = static_cast<double>(cand.size() - n + 1);
    const double numerator = std::max(static_cast<double>(matches), cfg.bleu_smoothing);
    if (numerator <= 0.0) return 0.0;
    log_sum += std::log(numerator / total);
  }
  const double c = static_cast<double>(cand.size());
  const double r = static_cast<double>(ref.size());
  const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
  return std::clamp(bp * std::exp(log_sum / static_cast<double>(max_n)), 0.0, 1.0);
}

int Validity(std::string_view raw_output) {
  try {
    repofs::ParseSnapshot(raw_output);
    return 1;
  } catch (const Error&) {
    return 0;
  }
}

std::optional<RepoSnapshot> RepairParse(std::string_view raw_output) {
  try {
    return repofs::ParseSnapshot(raw_output);
  } catch (const Error&) {
  }
  const size_t open = raw_output.find('{');
  const size_t close = raw_output.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos ||
      close < open) {
    return std::nullopt;
  }
  try {
    return repofs::ParseSnapshot(raw_output.substr(open, close - open + 1));
  } catch (const Error&) {
    return std::nullopt;
  }
}

ExampleRecord EvaluateExample(std::string id, const RepoSnapshot& context,
                              const RepoSnapshot& target,
                              std::string_view raw_prediction,
                              const MetricConfig& cfg) {
  ExampleRecord rec;
  rec.id = std::move(id);
  rec.valid = Validity(raw_prediction);
  const std::string reference = repofs::CanonicalSerialize(target);
  std::optional<RepoSnapshot> prediction = RepairParse(raw_prediction);
  if (!prediction) {
    rec.bleu = Bleu(reference, raw_prediction, cfg);
    return rec;
  }
  rec.repaired = rec.valid == 0;
  rec.exact_match = ExactMatch(target, *prediction);
  rec.bleu = Bleu(reference, repofs::CanonicalSerialize(*prediction), cfg);
  rec.change_similarity = ChangeSimilarity(context, target, *prediction, cfg).average;
  rec.structural_fidelity = StructuralFidelity(target, *prediction).f1;
  return rec;
}

MetricReport Aggregate(std::vector<ExampleRecord> records) {
  if (records.empty()) throw UsageError("cannot aggregate an empty record set");
  std::stable_sort(records.begin(), records.end(),
                   [](const ExampleRecord& a, const ExampleRecord& b) {
                     return a.id < b.id;
                   });
  MetricReport report;
  MetricMeans& m = report.means;
  for (const ExampleRecord& r : records) {
    m.exact_match += r.exact_match;
    m.valid += r.valid;
    m.bleu += r.bleu;
    m.change_similarity += r.change_similarity;
    m.structural_fidelity += r.structural_fidelity;
  }
  const auto n = static_cast<double>(records.size());
  m.exact_match /= n;
  m.valid /= n;
  m.bleu /= n;
  m.change_similarity /= n;
  m.structural_fidelity /= n;
  report.records = std::move(records);
  return report;
}

}  // namespace repodsl::metrics
