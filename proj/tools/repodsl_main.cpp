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

// repodsl command-line interface. Talks to the library only through the C
// API in repodsl.h.
//
// Exit codes: 0 success, 1 validation/usage/format errors, 2 I/O and
// endpoint errors, 3 DSL acceptance failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "repodsl/repodsl.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitRejected = 3;

int ExitCodeFor(rd_status s) {
  switch (s) {
    case RD_OK:
      return kExitOk;
    case RD_ERR_IO:
    case RD_ERR_TRANSPORT:
    case RD_ERR_ENDPOINT:
    case RD_ERR_REPLAY:
    case RD_ERR_INTERNAL:
      return kExitIo;
    case RD_ERR_DSL_REJECTED:
      return kExitRejected;
    default:
      return kExitValidation;
  }
}

// Carries a failed status up to main.
struct Failure {
  int exit_code;
};

void Check(rd_status s) {
  if (s == RD_OK) return;
  std::cerr << "repodsl: " << rd_status_name(s) << " error: " << rd_last_error() << "\n";
  throw Failure{ExitCodeFor(s)};
}

[[noreturn]] void Die(int code, const std::string& message) {
  std::cerr << "repodsl: " << message << "\n";
  throw Failure{code};
}

// Owning wrapper for strings returned by the C API.
class Str {
 public:
  Str() = default;
  Str(const Str&) = delete;
  Str& operator=(const Str&) = delete;
  ~Str() { rd_string_free(p_); }
  char** out() { return &p_; }
  std::string str() const { return p_ == nullptr ? std::string() : std::string(p_); }

 private:
  char* p_ = nullptr;
};

template <typename T, void (*Free)(T*)>
class Handle {
 public:
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p_); }
  T** out() { return &p_; }
  T* get() const { return p_; }

 private:
  T* p_ = nullptr;
};

using Snapshot = Handle<rd_snapshot, rd_snapshot_free>;
using Corpus = Handle<rd_corpus, rd_corpus_free>;
using Report = Handle<rd_report, rd_report_free>;
using Registry = Handle<rd_registry, rd_registry_free>;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Die(kExitIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& text) {
  const fs::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) Die(kExitIo, "cannot write " + path);
  out << text;
  if (!out.flush()) Die(kExitIo, "cannot write " + path);
}

// Writes to the file, or to stdout when path is empty or "-".
void Emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    WriteFile(path, text);
  }
}

struct Globals {
  std::string config;
  uint64_t seed = 0;
  double alpha = 5.0;
  double w_max = 20.0;
  int bleu_max_n = 4;
  int jobs = 1;
};

rd_metric_config MetricConfig(const Globals& g) {
  rd_metric_config cfg;
  rd_metric_config_init(&cfg);
  cfg.alpha = g.alpha;
  cfg.w_max = g.w_max;
  cfg.bleu_max_n = g.bleu_max_n;
  return cfg;
}

struct ReportOutputs {
  std::string model = "model";
  std::string setting;
  std::string records;
  std::string summary;
  std::string table;
};

void AddReportOptions(CLI::App* cmd, ReportOutputs& o) {
  cmd->add_option("--model", o.model, "Model label for the summary row");
  cmd->add_option("--setting", o.setting, "Setting label for the summary row");
  cmd->add_option("--records", o.records, "Per-example records (JSONL)");
  cmd->add_option("--summary", o.summary, "Summary (JSON)");
  cmd->add_option("--table", o.table, "Results table; '-' for stdout");
}

void WriteReport(const rd_report* report, const ReportOutputs& o, const std::string& setting) {
  if (!o.records.empty()) {
    Str s;
    Check(rd_report_records(report, s.out()));
    Emit(o.records, s.str());
  }
  if (!o.summary.empty()) {
    Str s;
    Check(rd_report_summary(report, o.model.c_str(), setting.c_str(), s.out()));
    Emit(o.summary, s.str());
  }
  Str t;
  Check(rd_report_table(report, o.model.c_str(), setting.c_str(), t.out()));
  Emit(o.table, t.str());
}

void LoadSnapshotArg(const std::string& path, Snapshot& snap) {
  if (fs::is_directory(path)) {
    Check(rd_snapshot_linearize(path.c_str(), snap.out()));
  } else {
    Check(rd_snapshot_load(path.c_str(), snap.out()));
  }
}

// ---- linearize / delinearize ----

struct LinearizeArgs {
  std::string dir;
  std::string out;
  std::string flat;
};

void RunLinearize(const LinearizeArgs& a) {
  Snapshot snap;
  Check(rd_snapshot_linearize(a.dir.c_str(), snap.out()));
  Str doc;
  Check(rd_snapshot_serialize(snap.get(), doc.out()));
  Emit(a.out, doc.str() + "\n");
  if (!a.flat.empty()) {
    Str flat;
    Check(rd_snapshot_flat_records(snap.get(), flat.out()));
    Emit(a.flat, flat.str());
  }
}

struct DelinearizeArgs {
  std::string document;
  std::string dest;
};

void RunDelinearize(const DelinearizeArgs& a) {
  Snapshot snap;
  Check(rd_snapshot_load(a.document.c_str(), snap.out()));
  Check(rd_snapshot_delinearize(snap.get(), a.dest.c_str()));
  std::cerr << "wrote " << rd_snapshot_file_count(snap.get()) << " files to " << a.dest << "\n";
}

// ---- eval ----

struct PromptArgs {
  std::string mode = "zero_shot";
  std::string grammar;
  std::string demo;
};

void AddPromptOptions(CLI::App* cmd, PromptArgs& p) {
  cmd->add_option("--mode", p.mode, "Prompt mode")
      ->check(CLI::IsMember({"zero_shot", "one_shot"}));
  cmd->add_option("--grammar", p.grammar, "Grammar summary text (one_shot)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--demo", p.demo, "Demonstration {instruction, output} JSON (one_shot)")
      ->check(CLI::ExistingFile);
}

void ApplyPromptArgs(const PromptArgs& p, rd_run_options& o) {
  o.mode = p.mode.c_str();
  o.grammar_path = p.grammar.empty() ? nullptr : p.grammar.c_str();
  o.demonstration_path = p.demo.empty() ? nullptr : p.demo.c_str();
}

std::string DefaultSetting(const std::string& mode) {
  return mode == "one_shot" ? "Raw+ICL" : "Raw";
}

struct EvalArgs {
  std::string corpus;
  std::string predictions;
  std::string replay;
  std::string explain;
  PromptArgs prompt;
  ReportOutputs out;
};

void RunEvalCmd(const EvalArgs& a, const Globals& g) {
  Corpus corpus;
  Check(rd_corpus_load(a.corpus.c_str(), corpus.out()));
  const rd_metric_config cfg = MetricConfig(g);
  if (!a.explain.empty()) {
    std::optional<std::string> raw;
    if (a.predictions.empty()) Die(kExitValidation, "--explain needs --predictions");
    std::istringstream lines(ReadFile(a.predictions));
    for (std::string line; std::getline(lines, line);) {
      const auto rec = nlohmann::json::parse(line, nullptr, false);
      if (rec.is_object() && rec.value("id", "") == a.explain && rec.contains("output") &&
          rec["output"].is_string()) {
        raw = rec["output"].get<std::string>();
      }
    }
    if (!raw) Die(kExitValidation, "no prediction for id '" + a.explain + "'");
    Str text;
    Check(rd_explain(corpus.get(), a.explain.c_str(), raw->c_str(), &cfg, text.out()));
    std::cout << text.str();
    return;
  }
  Report report;
  if (!a.replay.empty()) {
    rd_run_options o;
    rd_run_options_init(&o);
    ApplyPromptArgs(a.prompt, o);
    o.replay_path = a.replay.c_str();
    o.jobs = g.jobs;
    Check(rd_run(corpus.get(), &o, &cfg, report.out()));
    WriteReport(report.get(), a.out,
                a.out.setting.empty() ? DefaultSetting(a.prompt.mode) : a.out.setting);
    return;
  }
  Check(rd_evaluate_predictions(corpus.get(), a.predictions.c_str(), &cfg, g.jobs, report.out()));
  WriteReport(report.get(), a.out, a.out.setting.empty() ? "eval" : a.out.setting);
}

// ---- dataset ----

struct BuildArgs {
  std::string instruction;
  std::string instruction_file;
  std::string context;
  std::string target;
  std::string operation;
  std::string group;
  std::string corpus;
};

void RunBuild(const BuildArgs& a) {
  Corpus corpus;
  if (fs::exists(a.corpus)) {
    Check(rd_corpus_load(a.corpus.c_str(), corpus.out()));
  } else {
    Check(rd_corpus_new(corpus.out()));
  }
  const std::string instruction =
      a.instruction_file.empty() ? a.instruction : ReadFile(a.instruction_file);
  if (instruction.empty()) Die(kExitValidation, "an instruction is required");
  Str warnings;
  Check(rd_corpus_build_example(corpus.get(), instruction.c_str(), a.context.c_str(),
                                a.target.c_str(), a.operation.c_str(), a.group.c_str(),
                                warnings.out()));
  std::cerr << warnings.str();
  Check(rd_corpus_save(corpus.get(), a.corpus.c_str()));
}

struct VariantArgs {
  std::string corpus;
  std::string id;
  std::vector<std::string> keep;
  std::string out;
};

void RunVariant(const VariantArgs& a) {
  Corpus corpus;
  Check(rd_corpus_load(a.corpus.c_str(), corpus.out()));
  std::vector<const char*> keep;
  for (const std::string& k : a.keep) keep.push_back(k.c_str());
  Check(rd_corpus_add_minimal_variant(corpus.get(), a.id.c_str(), keep.data(), keep.size()));
  Check(rd_corpus_save(corpus.get(), (a.out.empty() ? a.corpus : a.out).c_str()));
}

struct SplitArgs {
  std::string corpus;
  double train_ratio = 0.8;
  double eval_ratio = -1.0;
  std::string train_out;
  std::string eval_out;
  std::string manifest;
};

void RunSplit(const SplitArgs& a, const Globals& g) {
  Corpus corpus;
  Check(rd_corpus_load(a.corpus.c_str(), corpus.out()));
  const double eval_ratio = a.eval_ratio < 0 ? 1.0 - a.train_ratio : a.eval_ratio;
  Corpus train, eval;
  Str manifest;
  Check(rd_corpus_split(corpus.get(), a.train_ratio, eval_ratio, g.seed, train.out(), eval.out(),
                        manifest.out()));
  Check(rd_corpus_save(train.get(), a.train_out.c_str()));
  Check(rd_corpus_save(eval.get(), a.eval_out.c_str()));
  Emit(a.manifest, manifest.str());
}

struct StatsArgs {
  std::string corpus;
  std::string out;
};

void RunStats(const StatsArgs& a) {
  Corpus corpus;
  Check(rd_corpus_load(a.corpus.c_str(), corpus.out()));
  Str stats;
  Check(rd_corpus_stats(corpus.get(), stats.out()));
  Emit(a.out, stats.str());
}

struct SftArgs {
  std::string corpus;
  std::string template_file;
  std::string codec = "whitespace";
  bool with_ids = false;
  std::string out;
};

void RunSft(const SftArgs& a) {
  Corpus corpus;
  Check(rd_corpus_load(a.corpus.c_str(), corpus.out()));
  const std::string tmpl = ReadFile(a.template_file);
  Str records;
  Check(rd_corpus_export_sft(corpus.get(), tmpl.c_str(), a.codec.c_str(), a.with_ids ? 1 : 0,
                             records.out()));
  Emit(a.out, records.str());
}

// ---- dslcheck ----

struct DslArgs {
  std::string input;
  std::string registry;
  std::string diagnostics;
  std::string artifacts;
};

int RunDslCheck(const DslArgs& a) {
  Snapshot snap;
  LoadSnapshotArg(a.input, snap);
  Registry registry;
  Check(rd_registry_load(a.registry.c_str(), registry.out()));
  int passed = 0;
  Str diags, arts;
  Check(rd_dsl_acceptance(snap.get(), registry.get(), &passed, diags.out(), arts.out()));
  if (!a.diagnostics.empty()) Emit(a.diagnostics, diags.str());
  else std::cerr << diags.str();
  if (passed && !a.artifacts.empty()) {
    Snapshot generated;
    const std::string doc = arts.str();
    Check(rd_snapshot_parse(doc.data(), doc.size(), generated.out()));
    Check(rd_snapshot_delinearize(generated.get(), a.artifacts.c_str()));
  }
  std::cout << (passed ? "PASS" : "FAIL") << " " << a.input << "\n";
  return passed ? kExitOk : kExitRejected;
}

// ---- run ----

struct RunArgs {
  std::string corpus;
  PromptArgs prompt;
  std::string endpoint;
  std::string replay;
  std::string token_env = "REPODSL_API_TOKEN";
  int max_in_flight = 4;
  int timeout_ms = 120000;
  int max_attempts = 3;
  int max_tokens = 4096;
  double temperature = 0.0;
  std::string generations;
  std::string archive_out;
  std::string prompts_out;
  ReportOutputs out;
};

void RunRunCmd(const RunArgs& a, const Globals& g) {
  Corpus corpus;
  Check(rd_corpus_load(a.corpus.c_str(), corpus.out()));
  rd_run_options o;
  rd_run_options_init(&o);
  ApplyPromptArgs(a.prompt, o);
  o.replay_path = a.replay.empty() ? nullptr : a.replay.c_str();
  o.base_url = a.endpoint.empty() ? nullptr : a.endpoint.c_str();
  o.model = a.out.model.c_str();
  o.token_env = a.token_env.c_str();
  o.max_in_flight = a.max_in_flight;
  o.timeout_ms = a.timeout_ms;
  o.max_attempts = a.max_attempts;
  o.max_tokens = a.max_tokens;
  o.temperature = a.temperature;
  o.seed = static_cast<int64_t>(g.seed);
  o.has_seed = 1;
  o.jobs = g.jobs;

  if (!a.prompts_out.empty()) {
    Str prompts;
    Check(rd_prompts(corpus.get(), &o, prompts.out()));
    Emit(a.prompts_out, prompts.str());
  }
  if (a.replay.empty() && a.endpoint.empty()) {
    if (a.prompts_out.empty()) Die(kExitValidation, "run needs --endpoint or --replay");
    return;  // prompts only
  }
  const rd_metric_config cfg = MetricConfig(g);
  Report report;
  Check(rd_run(corpus.get(), &o, &cfg, report.out()));
  if (!a.generations.empty()) {
    Str gens;
    Check(rd_report_generations(report.get(), gens.out()));
    Emit(a.generations, gens.str());
  }
  if (!a.archive_out.empty()) {
    Str archive;
    Check(rd_report_archive(report.get(), archive.out()));
    Emit(a.archive_out, archive.str());
  }
  WriteReport(report.get(), a.out,
              a.out.setting.empty() ? DefaultSetting(a.prompt.mode) : a.out.setting);
}

// ---- report ----

struct ReportArgs {
  std::vector<std::string> summaries;
  std::string out;
};

void RunReport(const ReportArgs& a) {
  std::vector<std::string> docs;
  for (const std::string& path : a.summaries) docs.push_back(ReadFile(path));
  std::vector<const char*> ptrs;
  for (const std::string& d : docs) ptrs.push_back(d.c_str());
  Str table;
  Check(rd_summary_table(ptrs.data(), ptrs.size(), table.out()));
  Emit(a.out, table.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linearize projects, build corpora, check DSL projects and score model edits."};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rd_version()));

  Globals g;
  app.set_config("--config", "", "Read options from a key = value file");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.add_option("--seed", g.seed, "Seed for splitting and generation")->capture_default_str();
  app.add_option("--alpha", g.alpha, "Line score exponent")->capture_default_str();
  app.add_option("--w-max", g.w_max, "Line weight cap")->capture_default_str();
  app.add_option("--bleu-max-n", g.bleu_max_n, "Highest BLEU n-gram order")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  LinearizeArgs lin;
  auto* c_lin = app.add_subcommand("linearize", "Serialize a directory as a document");
  c_lin->add_option("dir", lin.dir, "Project directory")->required()->check(CLI::ExistingDirectory);
  c_lin->add_option("-o,--out", lin.out, "Output document (default stdout)");
  c_lin->add_option("--flat", lin.flat, "Also write {path, content} records");

  DelinearizeArgs delin;
  auto* c_delin = app.add_subcommand("delinearize", "Recreate a directory from a document");
  c_delin->add_option("document", delin.document, "Input document")->required()->check(CLI::ExistingFile);
  c_delin->add_option("dest", delin.dest, "Empty or absent destination directory")->required();

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "Score predictions against a corpus");
  c_eval->add_option("--corpus", ev.corpus, "Corpus (JSONL)")->required()->check(CLI::ExistingFile);
  auto* ev_pred = c_eval->add_option("--predictions", ev.predictions, "{id, output} records (JSONL)")
                      ->check(CLI::ExistingFile);
  auto* ev_replay = c_eval->add_option("--replay", ev.replay, "Replay archive (JSONL)")
                        ->check(CLI::ExistingFile);
  ev_pred->excludes(ev_replay);
  c_eval->add_option("--explain", ev.explain, "Explain the change-similarity score of one id")
      ->needs(ev_pred);
  AddPromptOptions(c_eval, ev.prompt);
  AddReportOptions(c_eval, ev.out);

  auto* c_data = app.add_subcommand("dataset", "Corpus construction");
  c_data->require_subcommand(1);

  BuildArgs build;
  auto* c_build = c_data->add_subcommand("build", "Append an example built from two directories");
  auto* b_instr = c_build->add_option("--instruction", build.instruction, "Instruction text");
  auto* b_instr_file = c_build->add_option("--instruction-file", build.instruction_file,
                                           "Instruction text file")->check(CLI::ExistingFile);
  b_instr->excludes(b_instr_file);
  c_build->add_option("--context", build.context, "Context directory")->required()->check(CLI::ExistingDirectory);
  c_build->add_option("--target", build.target, "Target directory")->required()->check(CLI::ExistingDirectory);
  c_build->add_option("--operation", build.operation, "Operation tag")
      ->required()
      ->check(CLI::IsMember({"create", "add_attribute", "add_product", "delete_attribute", "delete_product"}));
  c_build->add_option("--group", build.group, "Group id")->required();
  c_build->add_option("--corpus", build.corpus, "Corpus to create or extend")->required();

  VariantArgs var;
  auto* c_var = c_data->add_subcommand("variant", "Append the minimal-context variant of an example");
  c_var->add_option("--corpus", var.corpus, "Corpus")->required()->check(CLI::ExistingFile);
  c_var->add_option("--id", var.id, "Full example id")->required();
  c_var->add_option("--keep", var.keep, "Path prefixes to keep")->required();
  c_var->add_option("-o,--out", var.out, "Output corpus (default: in place)");

  SplitArgs split;
  auto* c_split = c_data->add_subcommand("split", "Group-aware train/eval split");
  c_split->add_option("--corpus", split.corpus, "Corpus")->required()->check(CLI::ExistingFile);
  c_split->add_option("--train-ratio", split.train_ratio, "Train fraction")->capture_default_str();
  c_split->add_option("--eval-ratio", split.eval_ratio, "Eval fraction (default 1 - train)");
  c_split->add_option("--train-out", split.train_out, "Train corpus")->required();
  c_split->add_option("--eval-out", split.eval_out, "Eval corpus")->required();
  c_split->add_option("--manifest", split.manifest, "Split manifest (default stdout)");

  StatsArgs stats;
  auto* c_stats = c_data->add_subcommand("stats", "Corpus statistics");
  c_stats->add_option("--corpus", stats.corpus, "Corpus")->required()->check(CLI::ExistingFile);
  c_stats->add_option("-o,--out", stats.out, "Output (default stdout)");

  SftArgs sft;
  auto* c_sft = c_data->add_subcommand("export-sft", "Render supervised fine-tuning records");
  c_sft->add_option("--corpus", sft.corpus, "Corpus")->required()->check(CLI::ExistingFile);
  c_sft->add_option("--template", sft.template_file, "Prompt template with {instruction} and {context}")
      ->required()
      ->check(CLI::ExistingFile);
  c_sft->add_option("--codec", sft.codec, "Token codec")
      ->check(CLI::IsMember({"whitespace", "byte"}))
      ->capture_default_str();
  c_sft->add_flag("--with-ids", sft.with_ids, "Include input_ids and labels");
  c_sft->add_option("-o,--out", sft.out, "Output (default stdout)");

  DslArgs dsl;
  auto* c_dsl = app.add_subcommand("dslcheck", "Run the toy DSL generator as an acceptance check");
  c_dsl->add_option("input", dsl.input, "Project directory or linearized document")
      ->required()
      ->check(CLI::ExistingPath);
  c_dsl->add_option("--registry", dsl.registry, "Type registry JSON")->required()->check(CLI::ExistingFile);
  c_dsl->add_option("--diagnostics", dsl.diagnostics, "Diagnostics (JSONL); default stderr");
  c_dsl->add_option("--artifacts", dsl.artifacts, "Write generated stubs here on success");

  RunArgs run;
  auto* c_run = app.add_subcommand("run", "Prompt a model for every example and score the outputs");
  c_run->add_option("--corpus", run.corpus, "Corpus")->required()->check(CLI::ExistingFile);
  AddPromptOptions(c_run, run.prompt);
  auto* r_ep = c_run->add_option("--endpoint", run.endpoint, "Chat-completions base URL");
  auto* r_replay = c_run->add_option("--replay", run.replay, "Replay archive")->check(CLI::ExistingFile);
  r_ep->excludes(r_replay);
  c_run->add_option("--token-env", run.token_env, "Environment variable holding the bearer token")
      ->capture_default_str();
  c_run->add_option("--max-in-flight", run.max_in_flight, "Concurrent requests")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_run->add_option("--timeout-ms", run.timeout_ms, "Per-request timeout")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_run->add_option("--max-attempts", run.max_attempts, "Attempts per request")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_run->add_option("--max-tokens", run.max_tokens, "Completion budget")->capture_default_str();
  c_run->add_option("--temperature", run.temperature, "Sampling temperature")->capture_default_str();
  c_run->add_option("--generations", run.generations, "Generation log (JSONL)");
  c_run->add_option("--archive-out", run.archive_out, "Replay archive of the raw outputs");
  c_run->add_option("--prompts-out", run.prompts_out, "Rendered prompts (JSONL)");
  AddReportOptions(c_run, run.out);

  ReportArgs rep;
  auto* c_rep = app.add_subcommand("report", "Combine summary files into one table");
  c_rep->add_option("summaries", rep.summaries, "Summary JSON files")->required()->check(CLI::ExistingFile);
  c_rep->add_option("-o,--out", rep.out, "Output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*c_lin) RunLinearize(lin);
    else if (*c_delin) RunDelinearize(delin);
    else if (*c_eval) {
      if (ev.predictions.empty() && ev.replay.empty()) {
        Die(kExitValidation, "eval needs --predictions or --replay");
      }
      RunEvalCmd(ev, g);
    } else if (*c_build) RunBuild(build);
    else if (*c_var) RunVariant(var);
    else if (*c_split) RunSplit(split, g);
    else if (*c_stats) RunStats(stats);
    else if (*c_sft) RunSft(sft);
    else if (*c_dsl) return RunDslCheck(dsl);
    else if (*c_run) RunRunCmd(run, g);
    else if (*c_rep) RunReport(rep);
  } catch (const Failure& f) {
    return f.exit_code;
  }
  return kExitOk;
}
