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

// Exercises the shared library through its C header only.

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <string>

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "repodsl/repodsl.h"

namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = REPODSL_FIXTURES;

std::string Take(char* s) {
  std::string out = s ? s : "";
  rd_string_free(s);
  return out;
}

rd_snapshot* Parse(const char* text) {
  rd_snapshot* s = nullptr;
  REQUIRE(rd_snapshot_parse(text, std::strlen(text), &s) == RD_OK);
  return s;
}

}  // namespace

TEST_CASE("status names and the last error") {
  CHECK(std::string(rd_status_name(RD_OK)) == "ok");
  CHECK(std::string(rd_status_name(RD_ERR_SCHEMA)) == "schema");
  CHECK(std::strlen(rd_version()) > 0);

  rd_snapshot* s = nullptr;
  const char* bad = "{\"a\": 1}";
  CHECK(rd_snapshot_parse(bad, std::strlen(bad), &s) == RD_ERR_SCHEMA);
  CHECK(s == nullptr);
  CHECK(std::strlen(rd_last_error()) > 0);
  const char* broken = "{";
  CHECK(rd_snapshot_parse(broken, 1, &s) == RD_ERR_SYNTAX);
  CHECK(rd_snapshot_load((kFixtures / "nope.json").c_str(), &s) == RD_ERR_IO);
}

TEST_CASE("null arguments are rejected") {
  rd_snapshot* s = nullptr;
  CHECK(rd_snapshot_parse(nullptr, 0, &s) == RD_ERR_INVALID_ARGUMENT);
  CHECK(rd_snapshot_parse("{}", 2, nullptr) == RD_ERR_INVALID_ARGUMENT);
  int em = 0;
  CHECK(rd_exact_match(nullptr, nullptr, &em) == RD_ERR_INVALID_ARGUMENT);
  CHECK(rd_corpus_load(nullptr, nullptr) == RD_ERR_INVALID_ARGUMENT);
  rd_snapshot_free(nullptr);
  rd_corpus_free(nullptr);
  rd_report_free(nullptr);
  rd_string_free(nullptr);
}

TEST_CASE("snapshot handles and metrics") {
  rd_snapshot* ctx = Parse("{\"a\":\"x: AttributeType1\\n\"}");
  rd_snapshot* tgt = Parse("{\"a\":\"x: AttributeType1\\ny: AttributeType16\\n\"}");
  rd_snapshot* pred = Parse("{\"a\":\"x: AttributeType1\\ny: AttributeType15\\n\"}");

  int em = -1;
  CHECK(rd_exact_match(tgt, tgt, &em) == RD_OK);
  CHECK(em == 1);
  CHECK(rd_exact_match(tgt, pred, &em) == RD_OK);
  CHECK(em == 0);

  rd_metric_config cfg;
  rd_metric_config_init(&cfg);
  CHECK(cfg.alpha == 5.0);
  double cs = 0;
  CHECK(rd_change_similarity(ctx, tgt, pred, &cfg, &cs) == RD_OK);
  CHECK(cs == doctest::Approx(32.0 / 243.0).epsilon(1e-12));
  cfg.alpha = -1;
  CHECK(rd_change_similarity(ctx, tgt, pred, &cfg, &cs) == RD_ERR_VALIDATION);

  double p = 0, r = 0, f = 0;
  CHECK(rd_structural_fidelity(tgt, pred, &p, &r, &f) == RD_OK);
  CHECK(f == 1.0);
  CHECK(rd_snapshot_file_count(tgt) == 1);

  char* text = nullptr;
  CHECK(rd_snapshot_serialize(ctx, &text) == RD_OK);
  CHECK(Take(text) == "{\"a\":\"x: AttributeType1\\n\"}");
  CHECK(rd_line_diff("a\nb\n", "a\nc\n", &text) == RD_OK);
  CHECK(Take(text) == "a[0:1] equal b[0:1]\na[1:2] replace b[1:2]\n");

  CHECK(rd_validity("{\"a\":\"1\"}", 9) == 1);
  CHECK(rd_validity("nope", 4) == 0);

  rd_snapshot_free(ctx);
  rd_snapshot_free(tgt);
  rd_snapshot_free(pred);
}

TEST_CASE("corpus, evaluation and report through handles") {
  rd_corpus* corpus = nullptr;
  REQUIRE(rd_corpus_load((kFixtures / "corpus" / "corpus.jsonl").c_str(), &corpus) == RD_OK);
  CHECK(rd_corpus_size(corpus) == 4);

  rd_metric_config cfg;
  rd_metric_config_init(&cfg);
  rd_report* report = nullptr;
  REQUIRE(rd_evaluate_predictions(corpus, (kFixtures / "corpus" / "predictions_half.jsonl").c_str(),
                                  &cfg, 2, &report) == RD_OK);
  double means[5] = {};
  CHECK(rd_report_means(report, means) == RD_OK);
  CHECK(means[0] == 0.5);
  CHECK(means[1] == 1.0);
  char* table = nullptr;
  CHECK(rd_report_table(report, "m", "eval", &table) == RD_OK);
  CHECK(Take(table).rfind("Model", 0) == 0);
  char* summary = nullptr;
  CHECK(rd_report_summary(report, "m", "eval", &summary) == RD_OK);
  const std::string doc = Take(summary);
  const char* docs[] = {doc.c_str(), doc.c_str()};
  CHECK(rd_summary_table(docs, 2, &table) == RD_OK);
  const std::string two = Take(table);
  CHECK(std::count(two.begin(), two.end(), '\n') == 4);
  rd_report_free(report);

  rd_run_options opts;
  rd_run_options_init(&opts);
  const std::string replay = (kFixtures / "corpus" / "replay_zero_shot_perfect.jsonl").string();
  opts.replay_path = replay.c_str();
  REQUIRE(rd_run(corpus, &opts, &cfg, &report) == RD_OK);
  CHECK(rd_report_means(report, means) == RD_OK);
  CHECK(means[0] == 1.0);
  char* gens = nullptr;
  CHECK(rd_report_generations(report, &gens) == RD_OK);
  CHECK(!Take(gens).empty());
  rd_report_free(report);

  rd_corpus *train = nullptr, *eval = nullptr;
  char* manifest = nullptr;
  CHECK(rd_corpus_split(corpus, 0.5, 0.5, 3, &train, &eval, &manifest) == RD_OK);
  CHECK(rd_corpus_size(train) + rd_corpus_size(eval) == 4);
  CHECK(Take(manifest).find("\"groups\"") != std::string::npos);
  rd_corpus_free(train);
  rd_corpus_free(eval);

  char* sft = nullptr;
  CHECK(rd_corpus_export_sft(corpus, "{instruction}\n{context}\n", "byte", 0, &sft) == RD_OK);
  const std::string lines = Take(sft);
  CHECK(std::count(lines.begin(), lines.end(), '\n') == 4);
  CHECK(rd_corpus_export_sft(corpus, "{instruction}", "byte", 0, &sft) == RD_ERR_VALIDATION);
  rd_corpus_free(corpus);
}

TEST_CASE("dsl acceptance through handles") {
  rd_registry* reg = nullptr;
  REQUIRE(rd_registry_load(REPODSL_REGISTRY, &reg) == RD_OK);
  rd_snapshot* market = nullptr;
  REQUIRE(rd_snapshot_linearize((kFixtures / "market").c_str(), &market) == RD_OK);
  int passed = 0;
  char *diags = nullptr, *artifacts = nullptr;
  CHECK(rd_dsl_acceptance(market, reg, &passed, &diags, &artifacts) == RD_OK);
  CHECK(passed == 1);
  CHECK(Take(diags).empty());
  CHECK(Take(artifacts).find("generated") != std::string::npos);

  rd_snapshot* bad = Parse("{\"timeslices/s.dsl\":\"entity S {\\n  x: AttributeType1\\n}\\n\"}");
  CHECK(rd_dsl_acceptance(bad, reg, &passed, &diags, &artifacts) == RD_OK);
  CHECK(passed == 0);
  CHECK(Take(diags).find("LAYER_RULE") != std::string::npos);
  CHECK(Take(artifacts) == "{}");
  rd_snapshot_free(bad);
  rd_snapshot_free(market);
  rd_registry_free(reg);
}
