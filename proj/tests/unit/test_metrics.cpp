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

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "repodsl/error.hpp"
#include "repodsl/metrics.hpp"
#include "repodsl/repofs.hpp"
#include "testkit.hpp"

using namespace repodsl;
using namespace repodsl::metrics;
using repofs::FlatView;
using repofs::RepoSnapshot;
using repofs::Unflatten;

namespace {

double Cs(const FlatView& c, const FlatView& t, const FlatView& p, const MetricConfig& cfg = {}) {
  return ChangeSimilarity(Unflatten(c), Unflatten(t), Unflatten(p), cfg).average;
}

}  // namespace

TEST_CASE("single substituted token in an inserted line scores (2/3)^5") {
  const FlatView ctx{{"e.dsl", "entity A {\n}\n"}};
  const FlatView tgt{{"e.dsl", "entity A {\nattribute1: AttributeType16\n}\n"}};
  const FlatView pred{{"e.dsl", "entity A {\nattribute1: AttributeType15\n}\n"}};
  const ChangeScore s = ChangeSimilarity(Unflatten(ctx), Unflatten(tgt), Unflatten(pred));
  REQUIRE(s.lines.size() == 1);
  CHECK(s.lines[0].kind == ChangeKind::kInsert);
  CHECK(s.lines[0].e == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(std::fabs(s.average - 32.0 / 243.0) < 1e-12);
}

TEST_CASE("log-length weighting of a 9- and a 99-character line gives 1/3") {
  const std::string l9(9, 'a');
  const std::string l99(99, 'b');
  const FlatView ctx{{"f", ""}};
  const FlatView tgt{{"f", l9 + "\n" + l99 + "\n"}};
  const FlatView pred{{"f", l9 + "\n"}};
  const ChangeScore s = ChangeSimilarity(Unflatten(ctx), Unflatten(tgt), Unflatten(pred));
  REQUIRE(s.lines.size() == 2);
  CHECK(s.lines[0].s_line == 1.0);
  CHECK(s.lines[1].s_line == 0.0);
  CHECK(std::fabs(s.average - 1.0 / 3.0) < 1e-12);
}

TEST_CASE("line score and weight") {
  CHECK(LineScore(0.0, 5.0) == 1.0);
  CHECK(LineScore(1.0, 5.0) == 0.0);
  CHECK(LineScore(1.5, 5.0) == 0.0);
  CHECK(LineScore(-0.5, 5.0) == 1.0);
  CHECK(LineWeight("", 20.0) == 0.0);
  CHECK(LineWeight("äöü", 20.0) == doctest::Approx(std::log(4.0)));
  CHECK(LineWeight(std::string(1000, 'x'), 2.0) == 2.0);
  CHECK(CharLength("日本語") == 3);
}

TEST_CASE("deleted lines score by whether the prediction drops them") {
  const FlatView ctx{{"f", "keep\ngone\nkeep2\n"}};
  const FlatView tgt{{"f", "keep\nkeep2\n"}};
  CHECK(Cs(ctx, tgt, tgt) == 1.0);
  CHECK(Cs(ctx, tgt, ctx) == 0.0);
}

TEST_CASE("deleted files count every removed line") {
  const FlatView ctx{{"a", "x\n"}, {"b", "y1\ny2\n"}};
  const FlatView tgt{{"a", "x\n"}};
  const ChangeScore s = ChangeSimilarity(Unflatten(ctx), Unflatten(tgt), Unflatten(tgt));
  CHECK(s.lines.size() == 2);
  CHECK(s.average == 1.0);
  CHECK(Cs(ctx, tgt, ctx) == 0.0);
}

TEST_CASE("unequal replace blocks split into pairs plus surplus") {
  const FlatView ctx{{"f", "a1 a2\nb1 b2\nc\n"}};
  const FlatView tgt{{"f", "x1 x2\nc\n"}};
  const ChangeScore s = ChangeSimilarity(Unflatten(ctx), Unflatten(tgt), Unflatten(tgt));
  REQUIRE(s.lines.size() == 2);
  CHECK(s.lines[0].kind == ChangeKind::kReplace);
  CHECK(s.lines[1].kind == ChangeKind::kDelete);
  CHECK(s.lines[1].true_content == "b1 b2");
}

TEST_CASE("no expected change falls back to exact match") {
  const FlatView same{{"f", "x\n"}};
  CHECK(Cs(same, same, same) == 1.0);
  CHECK(Cs(same, same, {{"f", "y\n"}}) == 0.0);
}

TEST_CASE("all-empty changed lines use the plain mean") {
  const FlatView ctx{{"f", "x\n"}};
  const FlatView tgt{{"f", "x\n\n"}};
  CHECK(Cs(ctx, tgt, tgt) == 1.0);
  CHECK(Cs(ctx, tgt, ctx) == 0.0);
}

TEST_CASE("change similarity matches the straight-line reference") {
  testkit::Rng rng(41);
  const MetricConfig cfg;
  for (int i = 0; i < 300; ++i) {
    const FlatView ctx = testkit::RandomSmallRepo(rng, 4, 10);
    const FlatView tgt = testkit::MutateFlat(rng, ctx, 10, 4);
    const FlatView pred = rng.Chance(0.2) ? tgt : testkit::MutateFlat(rng, tgt, 10, 4);
    const std::map<std::string, std::string> c(ctx.begin(), ctx.end()), t(tgt.begin(), tgt.end()),
        p(pred.begin(), pred.end());
    const double want = oracle::ChangeSimilarity(c, t, p, cfg.alpha, cfg.w_max);
    CHECK(std::fabs(Cs(ctx, tgt, pred, cfg) - want) < 1e-9);
  }
}

TEST_CASE("change similarity stays in [0, 1]") {
  testkit::Rng rng(43);
  for (int i = 0; i < 200; ++i) {
    const FlatView ctx = testkit::RandomSmallRepo(rng, 3, 8);
    const FlatView tgt = testkit::MutateFlat(rng, ctx, 8, 3);
    const FlatView pred = testkit::RandomSmallRepo(rng, 3, 8);
    const double s = Cs(ctx, tgt, pred);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    CHECK(Cs(ctx, tgt, tgt) == 1.0);
  }
}

TEST_CASE("more substituted tokens never raise the line score") {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    testkit::Rng rng(seed);
    std::vector<std::string> tokens;
    const int n = rng.Int(2, 10);
    for (int i = 0; i < n; ++i) tokens.push_back("t" + std::to_string(i));
    std::vector<int> order(tokens.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    for (size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<size_t>(rng.Int(0, static_cast<int>(i) - 1))]);
    }
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (const auto& t : v) s += (s.empty() ? "" : " ") + t;
      return s;
    };
    const FlatView ctx{{"f", "head\n"}};
    const FlatView tgt{{"f", "head\n" + join(tokens) + "\n"}};
    double previous = 2.0;
    std::vector<std::string> mutated = tokens;
    for (int k = 0; k <= n; ++k) {
      if (k > 0) mutated[static_cast<size_t>(order[static_cast<size_t>(k - 1)])] = "zz" + std::to_string(k);
      const double s = Cs(ctx, tgt, {{"f", "head\n" + join(mutated) + "\n"}});
      CHECK(s <= previous);
      previous = s;
    }
    CHECK(previous == 0.0);
  }
}

TEST_CASE("structural fidelity matches set arithmetic") {
  testkit::Rng rng(47);
  const std::vector<std::string> universe{"a", "a/b", "a/b/c", "d", "d/e.txt", "f.dsl", "g", "g/h"};
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::string> t, p;
    for (const auto& path : universe) {
      if (rng.Chance(0.5)) t.push_back(path);
      if (rng.Chance(0.5)) p.push_back(path);
    }
    const StructScore got = PathSetScore(t, p);
    const oracle::Prf want = oracle::SetF1(t, p);
    CHECK(got.precision == want.p);
    CHECK(got.recall == want.r);
    CHECK(got.f1 == want.f1);
  }
}

TEST_CASE("structural fidelity worked example") {
  const RepoSnapshot t = repofs::ParseSnapshot(R"({"a":"1","b":"2","c":"3"})");
  const RepoSnapshot p = repofs::ParseSnapshot(R"({"a":"1","b":"x","d":"4"})");
  const StructScore s = StructuralFidelity(t, p);
  CHECK(s.precision == doctest::Approx(2.0 / 3.0));
  CHECK(s.recall == doctest::Approx(2.0 / 3.0));
  CHECK(s.f1 == doctest::Approx(2.0 / 3.0));
  const RepoSnapshot empty;
  CHECK(StructuralFidelity(empty, empty).f1 == 1.0);
  CHECK(StructuralFidelity(t, empty).f1 == 0.0);
  CHECK(StructuralFidelity(empty, t).f1 == 0.0);
}

TEST_CASE("bleu") {
  const MetricConfig cfg;
  CHECK(Bleu("a b c d", "a b c d", cfg) == doctest::Approx(1.0));
  CHECK(Bleu("", "", cfg) == 1.0);
  CHECK(Bleu("a b", "", cfg) == 0.0);
  // Every n-gram of the candidate matches; only the brevity penalty bites.
  CHECK(Bleu("a b c d", "a b c", cfg) == doctest::Approx(std::exp(1.0 - 4.0 / 3.0)));
  CHECK(Bleu("a b c d", "w x y z", cfg) < 1e-6);
  MetricConfig unigram = cfg;
  unigram.bleu_max_n = 1;
  CHECK(Bleu("a b c d", "a b x y", unigram) == doctest::Approx(0.5));
  CHECK_THROWS_AS(Bleu("a", "a", MetricConfig{1.0, 1.0, 0, 0.0}), ValidationError);
}

TEST_CASE("identical predictions score perfectly; one token breaks exact match only") {
  testkit::Rng rng(53);
  for (int i = 0; i < 100; ++i) {
    const FlatView ctx = testkit::RandomSmallRepo(rng, 3, 6);
    FlatView tgt = testkit::MutateFlat(rng, ctx, 6, 3);
    tgt["anchor.dsl"] = "entity Anchor {\n    attribute1: AttributeType16\n}\n";
    const RepoSnapshot c = Unflatten(ctx), t = Unflatten(tgt);
    const std::string text = repofs::CanonicalSerialize(t);
    const ExampleRecord r = EvaluateExample("x", c, t, text);
    CHECK(r.exact_match == 1);
    CHECK(r.valid == 1);
    CHECK(r.change_similarity == 1.0);
    CHECK(r.structural_fidelity == 1.0);
    CHECK(r.bleu == doctest::Approx(1.0));

    FlatView near = tgt;
    near["anchor.dsl"] = "entity Anchor {\n    attribute1: AttributeType15\n}\n";
    const ExampleRecord m =
        EvaluateExample("x", c, t, repofs::CanonicalSerialize(Unflatten(near)));
    CHECK(m.exact_match == 0);
    CHECK(m.structural_fidelity == 1.0);
  }
}

TEST_CASE("validity and repair") {
  CHECK(Validity(R"({"a":"x"})") == 1);
  CHECK(Validity("Here: {\"a\":\"x\"}") == 0);
  CHECK(Validity("") == 0);
  const auto repaired = RepairParse("Sure!\n```json\n{\"a\":\"x\"}\n```");
  REQUIRE(repaired.has_value());
  CHECK(repofs::Flatten(*repaired).at("a") == "x");
  CHECK_FALSE(RepairParse("no braces").has_value());
  CHECK_FALSE(RepairParse("} backwards {").has_value());
}

TEST_CASE("evaluate example on unusable output") {
  const RepoSnapshot t = repofs::ParseSnapshot(R"({"a":"x y"})");
  const ExampleRecord r = EvaluateExample("id", RepoSnapshot{}, t, "I cannot help with that.");
  CHECK(r.valid == 0);
  CHECK(r.exact_match == 0);
  CHECK(r.change_similarity == 0.0);
  CHECK(r.structural_fidelity == 0.0);
  CHECK_FALSE(r.repaired);

  const ExampleRecord w = EvaluateExample("id", RepoSnapshot{}, t, "Result: {\"a\":\"x y\"} done");
  CHECK(w.valid == 0);
  CHECK(w.repaired);
  CHECK(w.exact_match == 1);
}

TEST_CASE("aggregate sorts by id and averages") {
  std::vector<ExampleRecord> recs(2);
  recs[0].id = "b";
  recs[0].exact_match = 1;
  recs[0].bleu = 0.5;
  recs[1].id = "a";
  const MetricReport rep = Aggregate(recs);
  CHECK(rep.records[0].id == "a");
  CHECK(rep.means.exact_match == 0.5);
  CHECK(rep.means.bleu == 0.25);
  CHECK_THROWS_AS(Aggregate({}), UsageError);
}

TEST_CASE("metric config validation") {
  MetricConfig cfg;
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(cfg.Validate(), ValidationError);
  cfg = MetricConfig{};
  cfg.w_max = -1.0;
  CHECK_THROWS_AS(cfg.Validate(), ValidationError);
}
