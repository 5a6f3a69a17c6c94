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

/*
 * C interface to the repodsl toolkit.
 *
 * Every fallible call returns an rd_status; on failure a message describing
 * the error is available from rd_last_error() on the same thread until the
 * next call. Objects are opaque handles released with their *_free
 * function. Strings returned through char** out-parameters are
 * NUL-terminated, heap-allocated, and released with rd_string_free().
 * Handles are immutable after construction unless a function documents
 * otherwise, so const handles may be shared across threads.
 */
#ifndef REPODSL_REPODSL_H_
#define REPODSL_REPODSL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RD_API __declspec(dllexport)
#else
#define RD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rd_status {
  RD_OK = 0,
  RD_ERR_VALIDATION = 1,
  RD_ERR_IO = 2,
  RD_ERR_ENCODING = 3,
  RD_ERR_SYNTAX = 4,
  RD_ERR_SCHEMA = 5,
  RD_ERR_REFUSED = 6,
  RD_ERR_ALIGNMENT = 7,
  RD_ERR_USAGE = 8,
  RD_ERR_TRANSPORT = 9,
  RD_ERR_ENDPOINT = 10,
  RD_ERR_REPLAY = 11,
  RD_ERR_DSL_REJECTED = 12,
  RD_ERR_INVALID_ARGUMENT = 13,
  RD_ERR_INTERNAL = 14
} rd_status;

RD_API const char* rd_version(void);
RD_API const char* rd_status_name(rd_status status);
RD_API const char* rd_last_error(void);
RD_API void rd_string_free(char* s);

/* ---- Project snapshots ------------------------------------------------- */

typedef struct rd_snapshot rd_snapshot;

RD_API rd_status rd_snapshot_linearize(const char* dir, rd_snapshot** out);
/* Strict: RD_ERR_SYNTAX for malformed text, RD_ERR_SCHEMA for a wrong shape. */
RD_API rd_status rd_snapshot_parse(const char* text, size_t len, rd_snapshot** out);
/* Reads a linearized document from a file. */
RD_API rd_status rd_snapshot_load(const char* path, rd_snapshot** out);
/* dest must be absent or an empty directory (else RD_ERR_REFUSED). */
RD_API rd_status rd_snapshot_delinearize(const rd_snapshot* snapshot, const char* dest);
RD_API rd_status rd_snapshot_serialize(const rd_snapshot* snapshot, char** out);
/* One {"path","content"} record per line. */
RD_API rd_status rd_snapshot_flat_records(const rd_snapshot* snapshot, char** out);
RD_API size_t rd_snapshot_file_count(const rd_snapshot* snapshot);
RD_API void rd_snapshot_free(rd_snapshot* snapshot);

/* 1 when text parses as a linearized document, else 0. */
RD_API int rd_validity(const char* text, size_t len);

/* ---- Metrics ----------------------------------------------------------- */

typedef struct rd_metric_config {
  double alpha;
  double w_max;
  int bleu_max_n;
  double bleu_smoothing;
} rd_metric_config;

/* alpha 5.0, w_max 20.0, bleu_max_n 4, bleu_smoothing 1e-9. */
RD_API void rd_metric_config_init(rd_metric_config* cfg);

RD_API rd_status rd_exact_match(const rd_snapshot* target, const rd_snapshot* prediction,
                                int* out);
RD_API rd_status rd_change_similarity(const rd_snapshot* context, const rd_snapshot* target,
                                      const rd_snapshot* prediction,
                                      const rd_metric_config* cfg, double* out);
RD_API rd_status rd_structural_fidelity(const rd_snapshot* target,
                                        const rd_snapshot* prediction, double* precision,
                                        double* recall, double* f1);
RD_API rd_status rd_bleu(const char* reference, const char* candidate,
                         const rd_metric_config* cfg, double* out);
/* Rendered line-level edit script ("a[0:2] equal b[0:2]") between two texts. */
RD_API rd_status rd_line_diff(const char* a, const char* b, char** out);

/* ---- Corpora ----------------------------------------------------------- */

typedef struct rd_corpus rd_corpus;

RD_API rd_status rd_corpus_new(rd_corpus** out);
RD_API rd_status rd_corpus_load(const char* path, rd_corpus** out);
RD_API rd_status rd_corpus_save(const rd_corpus* corpus, const char* path);
RD_API size_t rd_corpus_size(const rd_corpus* corpus);
/* Appends a full-context example. Mutates corpus. warnings (nullable)
 * receives newline-separated warnings, possibly empty. */
RD_API rd_status rd_corpus_build_example(rd_corpus* corpus, const char* instruction,
                                         const char* context_dir, const char* target_dir,
                                         const char* operation, const char* group_id,
                                         char** warnings);
/* Appends the minimal-context variant of example_id. Mutates corpus. */
RD_API rd_status rd_corpus_add_minimal_variant(rd_corpus* corpus, const char* example_id,
                                               const char* const* keep, size_t keep_count);
RD_API rd_status rd_corpus_split(const rd_corpus* corpus, double train_ratio,
                                 double eval_ratio, uint64_t seed, rd_corpus** train,
                                 rd_corpus** eval, char** manifest_json);
RD_API rd_status rd_corpus_stats(const rd_corpus* corpus, char** stats_json);
/* Returns SFT records, one per line. codec: "whitespace" or "byte". */
RD_API rd_status rd_corpus_export_sft(const rd_corpus* corpus, const char* prompt_template,
                                      const char* codec, int with_ids, char** records_jsonl);
RD_API void rd_corpus_free(rd_corpus* corpus);

/* ---- Evaluation runs and reports --------------------------------------- */

typedef struct rd_report rd_report;

typedef struct rd_run_options {
  const char* mode;               /* "zero_shot" or "one_shot" */
  const char* grammar_path;       /* one_shot: grammar summary text file */
  const char* demonstration_path; /* one_shot: {"instruction","output"} file */
  const char* replay_path;        /* non-NULL: answer from this archive */
  const char* base_url;           /* endpoint when replay_path is NULL */
  const char* model;
  const char* token_env; /* env var holding the bearer token */
  int max_in_flight;
  int timeout_ms;
  int max_attempts;
  int backoff_ms;
  int max_tokens;
  double temperature;
  int64_t seed;
  int has_seed;
  int jobs;
} rd_run_options;

RD_API void rd_run_options_init(rd_run_options* options);

/* predictions_path holds {"id","output"} records. RD_ERR_VALIDATION lists
 * ids missing from either side. */
RD_API rd_status rd_evaluate_predictions(const rd_corpus* corpus, const char* predictions_path,
                                         const rd_metric_config* cfg, int jobs,
                                         rd_report** out);
/* Per-example generation failures are recorded in the report, not returned. */
RD_API rd_status rd_run(const rd_corpus* corpus, const rd_run_options* options,
                        const rd_metric_config* cfg, rd_report** out);
/* {"id","digest","prompt"} per example, without contacting any endpoint. */
RD_API rd_status rd_prompts(const rd_corpus* corpus, const rd_run_options* options,
                            char** jsonl);
/* Human-readable account of how one prediction scored on change similarity. */
RD_API rd_status rd_explain(const rd_corpus* corpus, const char* example_id,
                            const char* raw_prediction, const rd_metric_config* cfg,
                            char** out);

RD_API rd_status rd_report_records(const rd_report* report, char** jsonl);
RD_API rd_status rd_report_summary(const rd_report* report, const char* model,
                                   const char* setting, char** json);
RD_API rd_status rd_report_table(const rd_report* report, const char* model,
                                 const char* setting, char** table);
/* Generation log; empty for reports from rd_evaluate_predictions. */
RD_API rd_status rd_report_generations(const rd_report* report, char** jsonl);
/* Replay-archive records for every successful generation. */
RD_API rd_status rd_report_archive(const rd_report* report, char** jsonl);
/* EM, JSON validity, BLEU, change similarity, structural fidelity. */
RD_API rd_status rd_report_means(const rd_report* report, double out[5]);
RD_API void rd_report_free(rd_report* report);

/* Combines summary documents (as produced by rd_report_summary) into one
 * table. */
RD_API rd_status rd_summary_table(const char* const* summary_docs, size_t count, char** table);

/* ---- Toy DSL toolchain ------------------------------------------------- */

typedef struct rd_registry rd_registry;

RD_API rd_status rd_registry_load(const char* path, rd_registry** out);
RD_API void rd_registry_free(rd_registry* registry);
/* passed is 1 when the generator accepts the snapshot. diagnostics (nullable)
 * receives one JSON record per line; artifacts (nullable) receives the
 * generated files as a linearized document ("{}" on failure). */
RD_API rd_status rd_dsl_acceptance(const rd_snapshot* snapshot, const rd_registry* registry,
                                   int* passed, char** diagnostics, char** artifacts);

#ifdef __cplusplus
}
#endif

#endif /* REPODSL_REPODSL_H_ */
