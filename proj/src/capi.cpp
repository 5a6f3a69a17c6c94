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

#include "repodsl/repodsl.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "repodsl/dataset.hpp"
#include "repodsl/diffcore.hpp"
#include "repodsl/error.hpp"
#include "repodsl/evaluation.hpp"
#include "repodsl/metrics.hpp"
#include "repodsl/repofs.hpp"
#include "repodsl/runner.hpp"
#include "repodsl/toydsl.hpp"

using namespace repodsl;

struct rd_snapshot {
  repofs::RepoSnapshot value;
};

struct rd_corpus {
  std::vector<dataset::EvalExample> examples;
};

struct rd_report {
  metrics::MetricReport report;
  std::vector<runner::GenerationResult> generations;
};

struct rd_registry {
  dsl::TypeRegistry value;
};

namespace {

thread_local std::string g_last_error;

rd_status Fail(rd_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

class NullArgument : public std::exception {
 public:
  explicit NullArgument(const char* name) : msg_(std::string(name) + " must not be NULL") {}
  const char* what() const noexcept override { return msg_.c_str(); }

 private:
  std::string msg_;
};

template <typename T>
T* Need(T* p, const char* name) {
  if (p == nullptr) throw NullArgument(name);
  return p;
}

const char* NeedStr(const char* s, const char* name) { return Need(s, name); }

template <typename Fn>
rd_status Guard(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return RD_OK;
  } catch (const Error& e) {
    return Fail(static_cast<rd_status>(static_cast<int>(e.code())), e.what());
  } catch (const NullArgument& e) {
    return Fail(RD_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return Fail(RD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(RD_ERR_INTERNAL, e.what());
  } catch (...) {
    return Fail(RD_ERR_INTERNAL, "unknown exception");
  }
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

void Put(char** out, const std::string& s) {
  if (out != nullptr) *out = Dup(s);
}

std::string ReadText(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(std::string("cannot open ") + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

metrics::MetricConfig ToConfig(const rd_metric_config* cfg) {
  metrics::MetricConfig out;
  if (cfg != nullptr) {
    out.alpha = cfg->alpha;
    out.w_max = cfg->w_max;
    out.bleu_max_n = cfg->bleu_max_n;
    out.bleu_smoothing = cfg->bleu_smoothing;
  }
  out.Validate();
  return out;
}

runner::PromptAssets ToAssets(const rd_run_options& o) {
  runner::PromptAssets assets;
  if (o.grammar_path != nullptr) assets.grammar_summary = ReadText(o.grammar_path);
  if (o.demonstration_path != nullptr) {
    assets.demonstration = runner::LoadDemonstration(o.demonstration_path);
  }
  return assets;
}

runner::GenerationParams ToParams(const rd_run_options& o) {
  runner::GenerationParams p;
  p.max_tokens = o.max_tokens;
  p.temperature = o.temperature;
  p.seed = o.has_seed ? std::optional<int64_t>(o.seed) : std::nullopt;
  return p;
}

std::string Fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

extern "C" {

const char* rd_version(void) { return "0.3.0"; }

const char* rd_status_name(rd_status status) {
  switch (status) {
    case RD_OK:
      return "ok";
    case RD_ERR_INVALID_ARGUMENT:
      return "invalid_argument";
    case RD_ERR_INTERNAL:
      return "internal";
    default:
      break;
  }
  const int code = static_cast<int>(status);
  if (code >= 1 && code <= 12) return ErrorCodeName(static_cast<ErrorCode>(code)).data();
  return "unknown";
}

const char* rd_last_error(void) { return g_last_error.c_str(); }

void rd_string_free(char* s) { std::free(s); }

// ---- snapshots ----

rd_status rd_snapshot_linearize(const char* dir, rd_snapshot** out) {
  return Guard([&] {
    Need(out, "out");
    *out = new rd_snapshot{repofs::Linearize(NeedStr(dir, "dir"))};
  });
}

rd_status rd_snapshot_parse(const char* text, size_t len, rd_snapshot** out) {
  return Guard([&] {
    Need(out, "out");
    *out = new rd_snapshot{repofs::ParseSnapshot(std::string_view(NeedStr(text, "text"), len))};
  });
}

rd_status rd_snapshot_load(const char* path, rd_snapshot** out) {
  return Guard([&] {
    Need(out, "out");
    *out = new rd_snapshot{repofs::ParseSnapshot(ReadText(NeedStr(path, "path")))};
  });
}

rd_status rd_snapshot_delinearize(const rd_snapshot* snapshot, const char* dest) {
  return Guard([&] { repofs::Delinearize(Need(snapshot, "snapshot")->value, NeedStr(dest, "dest")); });
}

rd_status rd_snapshot_serialize(const rd_snapshot* snapshot, char** out) {
  return Guard([&] {
    Need(out, "out");
    Put(out, repofs::CanonicalSerialize(Need(snapshot, "snapshot")->value));
  });
}

rd_status rd_snapshot_flat_records(const rd_snapshot* snapshot, char** out) {
  return Guard([&] {
    Need(out, "out");
    Put(out, repofs::FlatRecords(repofs::Flatten(Need(snapshot, "snapshot")->value)));
  });
}

size_t rd_snapshot_file_count(const rd_snapshot* snapshot) {
  if (snapshot == nullptr) return 0;
  return repofs::Flatten(snapshot->value).size();
}

void rd_snapshot_free(rd_snapshot* snapshot) { delete snapshot; }

int rd_validity(const char* text, size_t len) {
  if (text == nullptr) return 0;
  return metrics::Validity(std::string_view(text, len));
}

// ---- metrics ----

void rd_metric_config_init(rd_metric_config* cfg) {
  if (cfg == nullptr) return;
  const metrics::MetricConfig d;
  cfg->alpha = d.alpha;
  cfg->w_max = d.w_max;
  cfg->bleu_max_n = d.bleu_max_n;
  cfg->bleu_smoothing = d.bleu_smoothing;
}

rd_status rd_exact_match(const rd_snapshot* target, const rd_snapshot* prediction, int* out) {
  return Guard([&] {
    *Need(out, "out") =
        metrics::ExactMatch(Need(target, "target")->value, Need(prediction, "prediction")->value);
  });
}

rd_status rd_change_similarity(const rd_snapshot* context, const rd_snapshot* target,
                               const rd_snapshot* prediction, const rd_metric_config* cfg,
                               double* out) {
  return Guard([&] {
    Need(out, "out");
    *out = metrics::ChangeSimilarity(Need(context, "context")->value,
                                     Need(target, "target")->value,
                                     Need(prediction, "prediction")->value, ToConfig(cfg))
               .average;
  });
}

rd_status rd_structural_fidelity(const rd_snapshot* target, const rd_snapshot* prediction,
                                 double* precision, double* recall, double* f1) {
  return Guard([&] {
    const metrics::StructScore s = metrics::StructuralFidelity(
        Need(target, "target")->value, Need(prediction, "prediction")->value);
    if (precision != nullptr) *precision = s.precision;
    if (recall != nullptr) *recall = s.recall;
    if (f1 != nullptr) *f1 = s.f1;
  });
}

rd_status rd_bleu(const char* reference, const char* candidate, const rd_metric_config* cfg,
                  double* out) {
  return Guard([&] {
    *Need(out, "out") = metrics::Bleu(NeedStr(reference, "reference"),
                                      NeedStr(candidate, "candidate"), ToConfig(cfg));
  });
}

rd_status rd_line_diff(const char* a, const char* b, char** out) {
  return Guard([&] {
    Need(out, "out");
    const auto la = repofs::SplitLines(NeedStr(a, "a"));
    const auto lb = repofs::SplitLines(NeedStr(b, "b"));
    Put(out, diff::LineDiff(la, lb).Render());
  });
}

// ---- corpora ----

rd_status rd_corpus_new(rd_corpus** out) {
  return Guard([&] { *Need(out, "out") = new rd_corpus{}; });
}

rd_status rd_corpus_load(const char* path, rd_corpus** out) {
  return Guard([&] {
    Need(out, "out");
    *out = new rd_corpus{dataset::LoadCorpus(NeedStr(path, "path"))};
  });
}

rd_status rd_corpus_save(const rd_corpus* corpus, const char* path) {
  return Guard(
      [&] { dataset::SaveCorpus(Need(corpus, "corpus")->examples, NeedStr(path, "path")); });
}

size_t rd_corpus_size(const rd_corpus* corpus) {
  return corpus == nullptr ? 0 : corpus->examples.size();
}

rd_status rd_corpus_build_example(rd_corpus* corpus, const char* instruction,
                                  const char* context_dir, const char* target_dir,
                                  const char* operation, const char* group_id,
                                  char** warnings) {
  return Guard([&] {
    Need(corpus, "corpus");
    dataset::BuildResult built = dataset::BuildExample(
        NeedStr(instruction, "instruction"), NeedStr(context_dir, "context_dir"),
        NeedStr(target_dir, "target_dir"),
        dataset::ParseOperation(NeedStr(operation, "operation")), NeedStr(group_id, "group_id"));
    for (const dataset::EvalExample& ex : corpus->examples) {
      if (ex.id == built.example.id) {
        throw ValidationError("corpus already contains example '" + ex.id + "'");
      }
    }
    std::string joined;
    for (const std::string& w : built.warnings) joined += w + "\n";
    corpus->examples.push_back(std::move(built.example));
    Put(warnings, joined);
  });
}

rd_status rd_corpus_add_minimal_variant(rd_corpus* corpus, const char* example_id,
                                        const char* const* keep, size_t keep_count) {
  return Guard([&] {
    Need(corpus, "corpus");
    const std::string id = NeedStr(example_id, "example_id");
    std::vector<std::string> prefixes;
    for (size_t i = 0; i < keep_count; ++i) prefixes.emplace_back(NeedStr(keep[i], "keep[i]"));
    const dataset::EvalExample* source = nullptr;
    for (const dataset::EvalExample& ex : corpus->examples) {
      if (ex.id == id) source = &ex;
    }
    if (source == nullptr) throw ValidationError("no example with id '" + id + "'");
    dataset::EvalExample variant = dataset::MinimalVariant(*source, prefixes);
    for (const dataset::EvalExample& ex : corpus->examples) {
      if (ex.id == variant.id) {
        throw ValidationError("corpus already contains example '" + variant.id + "'");
      }
    }
    corpus->examples.push_back(std::move(variant));
  });
}

rd_status rd_corpus_split(const rd_corpus* corpus, double train_ratio, double eval_ratio,
                          uint64_t seed, rd_corpus** train, rd_corpus** eval,
                          char** manifest_json) {
  return Guard([&] {
    Need(train, "train");
    Need(eval, "eval");
    dataset::SplitResult split =
        dataset::GroupedSplit(Need(corpus, "corpus")->examples, train_ratio, eval_ratio, seed);
    std::string manifest = split.Manifest().dump(2) + "\n";
    auto t = std::make_unique<rd_corpus>(rd_corpus{std::move(split.train)});
    auto e = std::make_unique<rd_corpus>(rd_corpus{std::move(split.eval)});
    Put(manifest_json, manifest);
    *train = t.release();
    *eval = e.release();
  });
}

rd_status rd_corpus_stats(const rd_corpus* corpus, char** stats_json) {
  return Guard([&] {
    Need(stats_json, "stats_json");
    Put(stats_json,
        dataset::ComputeCorpusStats(Need(corpus, "corpus")->examples).ToJson().dump(2) + "\n");
  });
}

rd_status rd_corpus_export_sft(const rd_corpus* corpus, const char* prompt_template,
                               const char* codec, int with_ids, char** records_jsonl) {
  return Guard([&] {
    Need(records_jsonl, "records_jsonl");
    const std::string tmpl = NeedStr(prompt_template, "prompt_template");
    dataset::ValidateTemplate(tmpl);
    std::unique_ptr<dataset::TokenCodec> c = dataset::MakeCodec(NeedStr(codec, "codec"));
    std::string out;
    for (const dataset::EvalExample& ex : Need(corpus, "corpus")->examples) {
      out += dataset::RenderSft(ex, tmpl, *c).ToJson(with_ids != 0).dump();
      out += '\n';
    }
    Put(records_jsonl, out);
  });
}

void rd_corpus_free(rd_corpus* corpus) { delete corpus; }

// ---- runs and reports ----

void rd_run_options_init(rd_run_options* o) {
  if (o == nullptr) return;
  const runner::EndpointConfig ep;
  const runner::GenerationParams gp;
  *o = rd_run_options{};
  o->mode = "zero_shot";
  o->token_env = "REPODSL_API_TOKEN";
  o->max_in_flight = ep.max_in_flight;
  o->timeout_ms = ep.timeout_ms;
  o->max_attempts = ep.max_attempts;
  o->backoff_ms = ep.backoff_ms;
  o->max_tokens = gp.max_tokens;
  o->temperature = gp.temperature;
  o->seed = gp.seed.value_or(0);
  o->has_seed = gp.seed.has_value() ? 1 : 0;
  o->jobs = 1;
}

rd_status rd_evaluate_predictions(const rd_corpus* corpus, const char* predictions_path,
                                  const rd_metric_config* cfg, int jobs, rd_report** out) {
  return Guard([&] {
    Need(out, "out");
    const auto predictions =
        evaluation::LoadPredictions(NeedStr(predictions_path, "predictions_path"));
    auto report = std::make_unique<rd_report>();
    report->report = evaluation::EvaluateCorpus(Need(corpus, "corpus")->examples, predictions,
                                                ToConfig(cfg), jobs);
    *out = report.release();
  });
}

rd_status rd_run(const rd_corpus* corpus, const rd_run_options* options,
                 const rd_metric_config* cfg, rd_report** out) {
  return Guard([&] {
    Need(out, "out");
    const rd_run_options& o = *Need(options, "options");
    runner::RunConfig rc;
    rc.mode = runner::ParsePromptMode(NeedStr(o.mode, "options->mode"));
    rc.assets = ToAssets(o);
    rc.params = ToParams(o);
    rc.metric = ToConfig(cfg);
    rc.jobs = o.jobs;
    std::unique_ptr<runner::Completer> completer;
    if (o.replay_path != nullptr) {
      completer = std::make_unique<runner::ReplayCompleter>(
          runner::ReplayCompleter::Load(o.replay_path));
    } else {
      runner::EndpointConfig ep;
      ep.base_url = NeedStr(o.base_url, "options->base_url");
      ep.model = o.model != nullptr ? o.model : "";
      if (o.token_env != nullptr) ep.token_env = o.token_env;
      ep.max_in_flight = o.max_in_flight;
      ep.timeout_ms = o.timeout_ms;
      ep.max_attempts = o.max_attempts;
      ep.backoff_ms = o.backoff_ms;
      completer = std::make_unique<runner::HttpCompleter>(std::move(ep));
    }
    runner::RunOutput result = runner::RunEval(Need(corpus, "corpus")->examples, *completer, rc);
    *out = new rd_report{std::move(result.report), std::move(result.generations)};
  });
}

rd_status rd_prompts(const rd_corpus* corpus, const rd_run_options* options, char** jsonl) {
  return Guard([&] {
    Need(jsonl, "jsonl");
    const rd_run_options& o = *Need(options, "options");
    const runner::PromptMode mode = runner::ParsePromptMode(NeedStr(o.mode, "options->mode"));
    const runner::PromptAssets assets = ToAssets(o);
    std::string out;
    for (const dataset::EvalExample& ex : Need(corpus, "corpus")->examples) {
      const std::string prompt = runner::BuildPrompt(ex, mode, assets).Render();
      out += nlohmann::json{{"id", ex.id},
                            {"digest", runner::PromptDigest(prompt)},
                            {"prompt", prompt}}
                 .dump();
      out += '\n';
    }
    Put(jsonl, out);
  });
}

rd_status rd_explain(const rd_corpus* corpus, const char* example_id, const char* raw_prediction,
                     const rd_metric_config* cfg, char** out) {
  return Guard([&] {
    Need(out, "out");
    const std::string id = NeedStr(example_id, "example_id");
    const std::string raw = NeedStr(raw_prediction, "raw_prediction");
    const metrics::MetricConfig mc = ToConfig(cfg);
    const dataset::EvalExample* ex = nullptr;
    for (const dataset::EvalExample& e : Need(corpus, "corpus")->examples) {
      if (e.id == id) ex = &e;
    }
    if (ex == nullptr) throw ValidationError("no example with id '" + id + "'");

    const metrics::ExampleRecord rec = metrics::EvaluateExample(id, ex->context, ex->target, raw, mc);
    std::string text = "example " + id + "\n";
    text += "  exact_match " + std::to_string(rec.exact_match) + "  valid " +
            std::to_string(rec.valid) + "  bleu " + Fixed(rec.bleu, 4) + "  change_similarity " +
            Fixed(rec.change_similarity, 4) + "  structural_fidelity " +
            Fixed(rec.structural_fidelity, 4) + (rec.repaired ? "  (repaired)" : "") + "\n";

    const repofs::FlatView ctx = repofs::Flatten(ex->context);
    const repofs::FlatView tgt = repofs::Flatten(ex->target);
    for (const std::string& key : dataset::ChangedKeys(*ex)) {
      auto c = ctx.find(key);
      auto t = tgt.find(key);
      const auto la = repofs::SplitLines(c == ctx.end() ? "" : c->second);
      const auto lb = repofs::SplitLines(t == tgt.end() ? "" : t->second);
      text += "\n" + key + " (context -> target)\n";
      std::istringstream script(diff::LineDiff(la, lb).Render());
      for (std::string line; std::getline(script, line);) text += "  " + line + "\n";
    }

    const std::optional<repofs::RepoSnapshot> pred = metrics::RepairParse(raw);
    if (!pred) {
      text += "\nprediction is not a parseable document\n";
      Put(out, text);
      return;
    }
    const metrics::ChangeScore cs = metrics::ChangeSimilarity(ex->context, ex->target, *pred, mc);
    text += "\nchanged lines\n";
    for (const metrics::ChangedLine& l : cs.lines) {
      text += "  " + std::string(metrics::ChangeKindName(l.kind)) + " " + l.key + " e=" +
              Fixed(l.e, 4) + " s=" + Fixed(l.s_line, 4) + " w=" + Fixed(l.weight, 4) + "\n";
      text += "    true: " + l.true_content + "\n";
      text += "    pred: " + (l.pred_content ? *l.pred_content : std::string("<none>")) + "\n";
    }
    text += "average " + Fixed(cs.average, 4) + "\n";
    Put(out, text);
  });
}

rd_status rd_report_records(const rd_report* report, char** jsonl) {
  return Guard([&] {
    Need(jsonl, "jsonl");
    Put(jsonl, evaluation::RecordsJsonl(Need(report, "report")->report));
  });
}

rd_status rd_report_summary(const rd_report* report, const char* model, const char* setting,
                            char** json) {
  return Guard([&] {
    Need(json, "json");
    const auto row = evaluation::MakeSummary(Need(report, "report")->report,
                                             NeedStr(model, "model"), NeedStr(setting, "setting"));
    Put(json, evaluation::SummaryToJson(row).dump(2) + "\n");
  });
}

rd_status rd_report_table(const rd_report* report, const char* model, const char* setting,
                          char** table) {
  return Guard([&] {
    Need(table, "table");
    Put(table, evaluation::RenderTable({evaluation::MakeSummary(
                   Need(report, "report")->report, NeedStr(model, "model"),
                   NeedStr(setting, "setting"))}));
  });
}

rd_status rd_report_generations(const rd_report* report, char** jsonl) {
  return Guard([&] {
    Need(jsonl, "jsonl");
    Put(jsonl, runner::GenerationsJsonl(Need(report, "report")->generations));
  });
}

rd_status rd_report_archive(const rd_report* report, char** jsonl) {
  return Guard([&] {
    Need(jsonl, "jsonl");
    std::string out;
    for (const runner::GenerationResult& g : Need(report, "report")->generations) {
      if (g.error.empty()) out += runner::ArchiveRecord(g.digest, g.raw_text) + "\n";
    }
    Put(jsonl, out);
  });
}

rd_status rd_report_means(const rd_report* report, double out[5]) {
  return Guard([&] {
    Need(out, "out");
    const metrics::MetricMeans& m = Need(report, "report")->report.means;
    out[0] = m.exact_match;
    out[1] = m.valid;
    out[2] = m.bleu;
    out[3] = m.change_similarity;
    out[4] = m.structural_fidelity;
  });
}

void rd_report_free(rd_report* report) { delete report; }

rd_status rd_summary_table(const char* const* summary_docs, size_t count, char** table) {
  return Guard([&] {
    Need(table, "table");
    if (count > 0) Need(summary_docs, "summary_docs");
    std::vector<evaluation::SummaryRow> rows;
    for (size_t i = 0; i < count; ++i) {
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(NeedStr(summary_docs[i], "summary_docs[i]"));
      } catch (const nlohmann::json::parse_error& e) {
        throw SyntaxError("summary " + std::to_string(i) + ": " + e.what());
      }
      rows.push_back(evaluation::SummaryFromJson(doc));
    }
    Put(table, evaluation::RenderTable(rows));
  });
}

// ---- toy DSL ----

rd_status rd_registry_load(const char* path, rd_registry** out) {
  return Guard([&] {
    Need(out, "out");
    *out = new rd_registry{dsl::TypeRegistry::Load(NeedStr(path, "path"))};
  });
}

void rd_registry_free(rd_registry* registry) { delete registry; }

rd_status rd_dsl_acceptance(const rd_snapshot* snapshot, const rd_registry* registry,
                            int* passed, char** diagnostics, char** artifacts) {
  return Guard([&] {
    Need(passed, "passed");
    const dsl::AcceptanceResult r =
        dsl::Acceptance(Need(snapshot, "snapshot")->value, Need(registry, "registry")->value);
    std::string diags;
    for (const dsl::Diagnostic& d : r.diagnostics) diags += d.ToJson().dump() + "\n";
    std::string arts = repofs::CanonicalSerialize(repofs::Unflatten(r.artifacts));
    *passed = r.passed ? 1 : 0;
    Put(diagnostics, diags);
    Put(artifacts, arts);
  });
}

}  // extern "C"
