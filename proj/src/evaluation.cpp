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

#include "repodsl/evaluation.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "repodsl/error.hpp"

namespace repodsl::evaluation {
using nlohmann::json;

namespace {

std::string Fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

double Number(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_number()) {
    throw SchemaError(std::string("summary field '") + key + "' missing or not a number");
  }
  return it->get<double>();
}

}  // namespace

json RecordToJson(const metrics::ExampleRecord& r) {
  json j{{"id", r.id},
         {"exact_match", r.exact_match},
         {"valid", r.valid},
         {"bleu", r.bleu},
         {"change_similarity", r.change_similarity},
         {"structural_fidelity", r.structural_fidelity},
         {"repaired", r.repaired}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

std::string RecordsJsonl(const metrics::MetricReport& report) {
  std::string out;
  for (const metrics::ExampleRecord& r : report.records) {
    out += RecordToJson(r).dump();
    out += '\n';
  }
  return out;
}

SummaryRow MakeSummary(const metrics::MetricReport& report, std::string model,
                       std::string setting) {
  return SummaryRow{std::move(model), std::move(setting), report.records.size(), report.means};
}

json SummaryToJson(const SummaryRow& row) {
  return json{{"schema_version", dataset::kSchemaVersion},
              {"model", row.model},
              {"setting", row.setting},
              {"examples", row.examples},
              {"exact_match", row.means.exact_match},
              {"valid_json", row.means.valid},
              {"bleu", row.means.bleu},
              {"change_similarity", row.means.change_similarity},
              {"structural_fidelity", row.means.structural_fidelity}};
}

SummaryRow SummaryFromJson(const json& doc) {
  if (!doc.is_object()) throw SchemaError("summary must be a JSON object");
  SummaryRow row;
  auto text = [&](const char* key) {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_string()) {
      throw SchemaError(std::string("summary field '") + key + "' missing or not a string");
    }
    return it->get<std::string>();
  };
  row.model = text("model");
  row.setting = text("setting");
  row.examples = static_cast<size_t>(Number(doc, "examples"));
  row.means.exact_match = Number(doc, "exact_match");
  row.means.valid = Number(doc, "valid_json");
  row.means.bleu = Number(doc, "bleu");
  row.means.change_similarity = Number(doc, "change_similarity");
  row.means.structural_fidelity = Number(doc, "structural_fidelity");
  return row;
}

std::string RenderTable(const std::vector<SummaryRow>& rows) {
  constexpr size_t kCols = std::size(kTableColumns);
  std::vector<std::array<std::string, kCols>> cells;
  cells.push_back({});
  for (size_t c = 0; c < kCols; ++c) cells[0][c] = kTableColumns[c];
  for (const SummaryRow& r : rows) {
    cells.push_back({r.model, r.setting, Fixed3(r.means.exact_match), Fixed3(r.means.valid),
                     Fixed3(r.means.bleu), Fixed3(r.means.change_similarity),
                     Fixed3(r.means.structural_fidelity)});
  }
  std::array<size_t, kCols> width{};
  for (const auto& row : cells) {
    for (size_t c = 0; c < kCols; ++c) width[c] = std::max(width[c], row[c].size());
  }
  auto line = [&](const std::array<std::string, kCols>& row) {
    std::string out;
    for (size_t c = 0; c < kCols; ++c) {
      if (c > 0) out += " | ";
      // Labels left-aligned, numbers right-aligned.
      const std::string pad(width[c] - row[c].size(), ' ');
      out += c < 2 ? row[c] + pad : pad + row[c];
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\n";
  };
  std::string out = line(cells[0]);
  for (size_t c = 0; c < kCols; ++c) {
    if (c > 0) out += "-+-";
    out += std::string(width[c], '-');
  }
  out += "\n";
  for (size_t i = 1; i < cells.size(); ++i) out += line(cells[i]);
  return out;
}

std::map<std::string, std::string> LoadPredictions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open predictions file: " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SyntaxError(where + e.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string() ||
        !rec.contains("output") || !rec["output"].is_string()) {
      throw SchemaError(where + "expected {\"id\": string, \"output\": string}");
    }
    if (!out.emplace(rec["id"].get<std::string>(), rec["output"].get<std::string>()).second) {
      throw ValidationError(where + "duplicate prediction id '" + rec["id"].get<std::string>() + "'");
    }
  }
  return out;
}

void ParallelFor(size_t count, int jobs, const std::function<void(size_t)>& fn) {
  const size_t workers = std::min<size_t>(count, static_cast<size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  {
    std::vector<std::jthread> pool;
    for (size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

metrics::MetricReport EvaluateCorpus(const std::vector<dataset::EvalExample>& corpus,
                                     const std::map<std::string, std::string>& predictions,
                                     const metrics::MetricConfig& cfg, int jobs) {
  cfg.Validate();
  std::vector<std::string> missing, unknown;
  std::set<std::string> ids;
  for (const dataset::EvalExample& ex : corpus) {
    ids.insert(ex.id);
    if (!predictions.contains(ex.id)) missing.push_back(ex.id);
  }
  for (const auto& [id, text] : predictions) {
    if (!ids.contains(id)) unknown.push_back(id);
  }
  if (!missing.empty() || !unknown.empty()) {
    std::string msg = "predictions do not align with the corpus";
    if (!missing.empty()) {
      msg += "; missing ids:";
      for (const auto& id : missing) msg += " " + id;
    }
    if (!unknown.empty()) {
      msg += "; unknown ids:";
      for (const auto& id : unknown) msg += " " + id;
    }
    throw ValidationError(msg);
  }
  std::vector<metrics::ExampleRecord> records(corpus.size());
  ParallelFor(corpus.size(), jobs, [&](size_t i) {
    const dataset::EvalExample& ex = corpus[i];
    records[i] = metrics::EvaluateExample(ex.id, ex.context, ex.target,
                                          predictions.at(ex.id), cfg);
  });
  return metrics::Aggregate(std::move(records));
}

}  // namespace repodsl::evaluation
