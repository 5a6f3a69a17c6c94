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

#include <set>

#include "doctest.h"
#include "repodsl/dataset.hpp"
#include "repodsl/error.hpp"
#include "repodsl/repofs.hpp"
#include "testkit.hpp"

using namespace repodsl;
using namespace repodsl::dataset;
using repofs::ParseSnapshot;

namespace {

EvalExample MakeExample(const std::string& group, const char* ctx, const char* tgt,
                        const std::string& instruction = "do it") {
  EvalExample ex;
  ex.group_id = group;
  ex.id = ExampleId(group, Variant::kFull);
  ex.instruction = instruction;
  ex.operation = Operation::kAddAttribute;
  ex.context = ParseSnapshot(ctx);
  ex.target = ParseSnapshot(tgt);
  return ex;
}

}  // namespace

TEST_CASE("operation and variant names round trip") {
  for (Operation op : {Operation::kCreate, Operation::kAddAttribute, Operation::kAddProduct,
                       Operation::kDeleteAttribute, Operation::kDeleteProduct}) {
    CHECK(ParseOperation(OperationName(op)) == op);
  }
  CHECK(OperationName(Operation::kAddProduct) == "add_product");
  CHECK(ParseVariant("minimal") == Variant::kMinimal);
  CHECK_THROWS_AS(ParseOperation("rename"), ValidationError);
  CHECK_THROWS_AS(ParseVariant("tiny"), ValidationError);
}

TEST_CASE("build example from directories") {
  testkit::TempDir tmp;
  testkit::WriteFile(tmp / "ctx" / "a.dsl", "entity A {}\n");
  testkit::WriteFile(tmp / "tgt" / "a.dsl", "entity A {\n  x: AttributeType1\n}\n");
  const BuildResult r = BuildExample("Add x", tmp / "ctx", tmp / "tgt", Operation::kAddAttribute, "g1");
  CHECK(r.example.id == "g1:full");
  CHECK(r.warnings.empty());
  CHECK(ChangedKeys(r.example) == std::set<std::string>{"a.dsl"});

  const BuildResult same = BuildExample("noop", tmp / "ctx", tmp / "ctx", Operation::kCreate, "g2");
  REQUIRE(same.warnings.size() == 1);
  CHECK(same.warnings[0].find("empty change-set") != std::string::npos);

  CHECK_THROWS_AS(BuildExample("x", tmp / "nope", tmp / "ctx", Operation::kCreate, "g"), IoError);
  CHECK_THROWS_AS(BuildExample("x", tmp / "ctx", tmp / "ctx", Operation::kCreate, ""), ValidationError);
}

TEST_CASE("minimal variant keeps only the named prefixes") {
  const EvalExample ex = MakeExample(
      "g", R"({"server":{"a.dsl":"1","b.dsl":"2"},"ui":{"v.dsl":"3"},"empty":{}})",
      R"({"server":{"a.dsl":"1 changed","b.dsl":"2"},"ui":{"v.dsl":"3"},"empty":{}})");
  const EvalExample m = MinimalVariant(ex, {"server/a.dsl"});
  CHECK(m.id == "g:minimal");
  CHECK(m.variant == Variant::kMinimal);
  CHECK(m.group_id == "g");
  CHECK(repofs::CanonicalSerialize(m.context) == R"({"server":{"a.dsl":"1"}})");
  CHECK(repofs::CanonicalSerialize(m.target) == R"({"server":{"a.dsl":"1 changed"}})");
  CHECK(ChangedKeys(m) == ChangedKeys(ex));

  const EvalExample dir = MinimalVariant(ex, {"server/"});
  CHECK(repofs::Flatten(dir.context).size() == 2);

  try {
    MinimalVariant(ex, {"ui"});
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("server/a.dsl") != std::string::npos);
  }
  CHECK_THROWS_AS(MinimalVariant(ex, {"/"}), ValidationError);
}

TEST_CASE("grouped splits never separate a group") {
  for (uint64_t seed = 0; seed < 300; ++seed) {
    testkit::Rng rng(seed);
    const auto corpus = testkit::RandomCorpus(rng, rng.Int(2, 12));
    const double train = rng.Real(0.5, 0.9);
    const SplitResult s = GroupedSplit(corpus, train, 1.0 - train, seed);
    std::set<std::string> train_groups, eval_groups;
    for (const auto& ex : s.train) train_groups.insert(ex.group_id);
    for (const auto& ex : s.eval) eval_groups.insert(ex.group_id);
    for (const auto& g : train_groups) CHECK_FALSE(eval_groups.contains(g));
    CHECK(s.train.size() + s.eval.size() == corpus.size());
    CHECK_FALSE(s.train.empty());
    CHECK_FALSE(s.eval.empty());
    for (const auto& [gid, side] : s.assignment) {
      CHECK((side == "eval") == eval_groups.contains(gid));
    }
  }
}

TEST_CASE("splits are deterministic per seed") {
  testkit::Rng rng(99);
  const auto corpus = testkit::RandomCorpus(rng, 20);
  const std::string a = GroupedSplit(corpus, 0.8, 0.2, 7).Manifest().dump();
  const std::string b = GroupedSplit(corpus, 0.8, 0.2, 7).Manifest().dump();
  CHECK(a == b);
  bool differs = false;
  for (uint64_t seed = 0; seed < 20 && !differs; ++seed) {
    differs = GroupedSplit(corpus, 0.8, 0.2, seed).Manifest()["groups"] !=
              GroupedSplit(corpus, 0.8, 0.2, 7).Manifest()["groups"];
  }
  CHECK(differs);
}

TEST_CASE("split lands near the requested ratio for equal-size groups") {
  std::vector<EvalExample> corpus;
  for (int g = 0; g < 10; ++g) corpus.push_back(MakeExample("g" + std::to_string(g), "{}", R"({"a":"x"})"));
  const SplitResult s = GroupedSplit(corpus, 0.8, 0.2, 3);
  CHECK(s.eval.size() == 2);
  CHECK(s.deviation < 1e-12);
  CHECK(s.Manifest()["eval_examples"] == 2);
}

TEST_CASE("split input validation") {
  std::vector<EvalExample> one{MakeExample("g", "{}", "{}")};
  CHECK_THROWS_AS(GroupedSplit(one, 0.8, 0.2, 1), ValidationError);
  one.push_back(MakeExample("h", "{}", "{}"));
  CHECK_THROWS_AS(GroupedSplit(one, 0.8, 0.3, 1), ValidationError);
  CHECK_THROWS_AS(GroupedSplit(one, 1.0, 0.0, 1), ValidationError);
}

TEST_CASE("codecs are lossless") {
  testkit::Rng rng(61);
  for (int i = 0; i < 300; ++i) {
    const std::string text = testkit::RandomText(rng, 20);
    WhitespaceCodec ws;
    CHECK(ws.Decode(ws.Encode(text)) == text);
    ByteCodec bytes;
    CHECK(bytes.Decode(bytes.Encode(text)) == text);
    CHECK(bytes.Encode(text).size() == text.size());
  }
  CHECK_THROWS_AS(MakeCodec("bpe"), ValidationError);
  CHECK(MakeCodec("byte")->Name() == "byte");
}

TEST_CASE("sft records align prompt and target") {
  const EvalExample ex = MakeExample("g", R"({"a":"x y"})", R"({"a":"x y z"})", "Add z");
  WhitespaceCodec codec;
  const SftRecord rec = RenderSft(ex, "Task: {instruction}\nRepo: {context}\nAnswer:\n", codec);
  CHECK(rec.rendered_prompt == "Task: Add z\nRepo: {\"a\":\"x y\"}\nAnswer:\n");
  CHECK(rec.rendered_target == R"({"a":"x y z"})");
  CHECK(rec.prompt_tokens == rec.mask_boundary);
  CHECK(rec.prompt_tokens + rec.target_tokens == rec.input_ids.size());
  std::span<const int32_t> ids(rec.input_ids);
  CHECK(codec.Decode(ids.first(rec.mask_boundary)) == rec.rendered_prompt);
  CHECK(codec.Decode(ids.subspan(rec.mask_boundary)) == rec.rendered_target);

  const std::vector<int32_t> labels = rec.Labels();
  for (size_t i = 0; i < labels.size(); ++i) {
    CHECK(labels[i] == (i < rec.mask_boundary ? kIgnoreLabel : rec.input_ids[i]));
  }
  CHECK(rec.ToJson(false).contains("mask_boundary"));
  CHECK_FALSE(rec.ToJson(false).contains("input_ids"));
  CHECK(rec.ToJson(true)["labels"].size() == rec.input_ids.size());
}

TEST_CASE("a template that glues onto the target is rejected") {
  const EvalExample ex = MakeExample("g", R"({"a":"x"})", R"({"a":"y"})");
  WhitespaceCodec codec;
  CHECK_THROWS_AS(RenderSft(ex, "{instruction} {context} Answer:", codec), AlignmentError);
  ByteCodec bytes;
  CHECK_NOTHROW(RenderSft(ex, "{instruction} {context} Answer:", bytes));
}

TEST_CASE("template placeholders are substituted once") {
  const EvalExample ex = MakeExample("g", R"({"a":"{instruction}"})", R"({"a":"y"})", "{context}");
  ByteCodec codec;
  const SftRecord rec = RenderSft(ex, "{instruction}|{context}\n", codec);
  CHECK(rec.rendered_prompt == "{context}|{\"a\":\"{instruction}\"}\n");
  CHECK_THROWS_AS(ValidateTemplate("{instruction} only"), ValidationError);
  CHECK_THROWS_AS(ValidateTemplate("{context} only"), ValidationError);
}

TEST_CASE("corpus statistics against hand counts") {
  std::vector<EvalExample> corpus;
  corpus.push_back(MakeExample("g1", R"({"s":{"a":"1\n2\n"}})", R"({"s":{"a":"1\n2\n3\n"},"t":{}})"));
  EvalExample m = MakeExample("g1", R"({"b":"x"})", R"({"b":"x\ny"})");
  m.variant = Variant::kMinimal;
  m.id = ExampleId("g1", Variant::kMinimal);
  corpus.push_back(m);
  const CorpusStats s = ComputeCorpusStats(corpus);
  CHECK(s.example_count == 2);
  CHECK(s.mean_context_lines == doctest::Approx((2 + 1) / 2.0));
  CHECK(s.mean_target_lines == doctest::Approx((3 + 2) / 2.0));
  CHECK(s.mean_files == doctest::Approx((1 + 1) / 2.0));
  CHECK(s.mean_folders == doctest::Approx((2 + 0) / 2.0));
  CHECK(s.variant_ratio == doctest::Approx(0.5));
  CHECK_THROWS_AS(ComputeCorpusStats({}), UsageError);
}

TEST_CASE("corpus files round trip and report bad lines") {
  testkit::TempDir tmp;
  testkit::Rng rng(71);
  const auto corpus = testkit::RandomCorpus(rng, 5);
  SaveCorpus(corpus, tmp / "c.jsonl");
  CHECK(LoadCorpus(tmp / "c.jsonl") == corpus);
  CHECK(CorpusText(corpus) == testkit::ReadFile(tmp / "c.jsonl"));

  testkit::WriteFile(tmp / "bad.jsonl", CorpusText({corpus[0]}) + "\n{oops\n");
  try {
    LoadCorpus(tmp / "bad.jsonl");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
  testkit::WriteFile(tmp / "dup.jsonl", CorpusText({corpus[0], corpus[0]}));
  CHECK_THROWS_AS(LoadCorpus(tmp / "dup.jsonl"), ValidationError);

  nlohmann::json rec = ExampleToJson(corpus[0]);
  rec["schema_version"] = 2;
  CHECK_THROWS_AS(ExampleFromJson(rec), SchemaError);
  rec = ExampleToJson(corpus[0]);
  rec.erase("target");
  CHECK_THROWS_AS(ExampleFromJson(rec), SchemaError);
  CHECK_THROWS_AS(LoadCorpus(tmp / "missing.jsonl"), IoError);
}
