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

#include "repodsl/runner.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "httplib.h"
#include "repodsl/error.hpp"
#include "repodsl/evaluation.hpp"

namespace repodsl::runner {
using nlohmann::json;

namespace {

void AppendBlock(std::string& out, std::string_view header, std::string_view body) {
  out += "### ";
  out += header;
  out += '\n';
  out += body;
  if (body.empty() || body.back() != '\n') out += '\n';
  out += '\n';
}

std::string Excerpt(std::string_view body) {
  constexpr size_t kMax = 200;
  if (body.size() <= kMax) return std::string(body);
  return std::string(body.substr(0, kMax)) + "...";
}

// Releases an in-flight slot on scope exit.
class SlotGuard {
 public:
  SlotGuard(std::counting_semaphore<1024>& slots, std::atomic<int>& in_flight,
            std::atomic<int>& peak)
      : slots_(slots), in_flight_(in_flight) {
    slots_.acquire();
    int now = ++in_flight_;
    int prev = peak.load();
    while (now > prev && !peak.compare_exchange_weak(prev, now)) {
    }
  }
  ~SlotGuard() {
    --in_flight_;
    slots_.release();
  }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<1024>& slots_;
  std::atomic<int>& in_flight_;
};

}  // namespace

std::string_view PromptModeName(PromptMode mode) {
  return mode == PromptMode::kZeroShot ? "zero_shot" : "one_shot";
}

PromptMode ParsePromptMode(std::string_view name) {
  if (name == "zero_shot") return PromptMode::kZeroShot;
  if (name == "one_shot") return PromptMode::kOneShot;
  throw ValidationError("unknown prompt mode '" + std::string(name) +
                        "' (expected zero_shot or one_shot)");
}

Demonstration LoadDemonstration(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open demonstration file: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SyntaxError(path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("instruction") || !doc["instruction"].is_string() ||
      !doc.contains("output")) {
    throw SchemaError(path.string() + ": expected {\"instruction\": ..., \"output\": ...}");
  }
  Demonstration demo;
  demo.instruction = doc["instruction"].get<std::string>();
  const json& output = doc["output"];
  if (output.is_string()) {
    demo.output = output.get<std::string>();
  } else if (output.is_object()) {
    demo.output = repofs::CanonicalSerialize(repofs::SnapshotFromJson(output));
  } else {
    throw SchemaError(path.string() + ": demonstration output must be a string or a document");
  }
  return demo;
}

std::string PromptSpec::Render() const {
  std::string out;
  if (grammar_summary) AppendBlock(out, "DSL grammar rules", *grammar_summary);
  if (demonstration) {
    AppendBlock(out, "Example instruction", demonstration->instruction);
    AppendBlock(out, "Example output", demonstration->output);
  }
  AppendBlock(out, "Instruction", instruction);
  AppendBlock(out, "Project context", context_document);
  out += kOutputDelimiter;
  return out;
}

PromptSpec BuildPrompt(const dataset::EvalExample& example, PromptMode mode,
                       const PromptAssets& assets) {
  if (mode == PromptMode::kOneShot &&
      (!assets.grammar_summary || !assets.demonstration)) {
    throw ValidationError("one_shot prompting needs a grammar summary and a demonstration");
  }
  if (mode == PromptMode::kZeroShot && (assets.grammar_summary || assets.demonstration)) {
    throw ValidationError("zero_shot prompting takes no grammar summary or demonstration");
  }
  PromptSpec spec;
  spec.mode = mode;
  spec.grammar_summary = assets.grammar_summary;
  spec.demonstration = assets.demonstration;
  spec.instruction = example.instruction;
  spec.context_document = repofs::CanonicalSerialize(example.context);
  return spec;
}

std::string PromptDigest(std::string_view prompt) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(prompt.data(), prompt.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

json GenerationResult::ToJson() const {
  json j{{"id", id},
         {"digest", digest},
         {"raw_text", raw_text},
         {"latency_ms", latency_ms},
         {"model", model}};
  if (prompt_tokens) j["prompt_tokens"] = *prompt_tokens;
  if (completion_tokens) j["completion_tokens"] = *completion_tokens;
  if (!error.empty()) j["error"] = error;
  return j;
}

HttpCompleter::HttpCompleter(EndpointConfig config)
    : config_(std::move(config)), slots_(std::clamp(config_.max_in_flight, 1, 1024)) {
  const std::string& url = config_.base_url;
  const size_t scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw ValidationError("endpoint URL needs a scheme (http:// or https://): " + url);
  }
  const size_t path_start = url.find('/', scheme + 3);
  scheme_host_port_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  path_ += "/chat/completions";
  if (config_.max_attempts < 1) throw ValidationError("max_attempts must be >= 1");
}

GenerationResult HttpCompleter::Complete(std::string_view prompt,
                                         const GenerationParams& params) {
  json body{{"model", config_.model},
            {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
            {"max_tokens", params.max_tokens},
            {"temperature", params.temperature}};
  if (params.seed) body["seed"] = *params.seed;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!config_.token_env.empty()) {
    if (const char* token = std::getenv(config_.token_env.c_str()); token && *token) {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
  }

  GenerationResult result;
  result.digest = PromptDigest(prompt);
  std::string last_failure;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(static_cast<int64_t>(config_.backoff_ms) << (attempt - 2)));
    }
    const auto start = std::chrono::steady_clock::now();
    httplib::Result res;
    {
      SlotGuard slot(slots_, in_flight_, peak_);
      httplib::Client client(scheme_host_port_);
      const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
      client.set_connection_timeout(timeout);
      client.set_read_timeout(timeout);
      client.set_write_timeout(timeout);
      res = client.Post(path_, headers, payload, "application/json");
    }
    result.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    if (!res) {
      last_failure = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status) + ": " + Excerpt(res->body);
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      throw EndpointError("HTTP " + std::to_string(res->status) + " from " + scheme_host_port_ +
                          path_ + ": " + Excerpt(res->body));
    }
    json reply;
    try {
      reply = json::parse(res->body);
    } catch (const json::parse_error&) {
      throw EndpointError("endpoint returned non-JSON body: " + Excerpt(res->body));
    }
    const json* text = nullptr;
    if (reply.contains("choices") && reply["choices"].is_array() && !reply["choices"].empty()) {
      const json& choice = reply["choices"][0];
      if (choice.contains("message") && choice["message"].contains("content") &&
          choice["message"]["content"].is_string()) {
        text = &choice["message"]["content"];
      } else if (choice.contains("text") && choice["text"].is_string()) {
        text = &choice["text"];
      }
    }
    if (text == nullptr) {
      throw EndpointError("endpoint reply has no completion text: " + Excerpt(res->body));
    }
    result.raw_text = text->get<std::string>();
    result.model = reply.value("model", config_.model);
    if (reply.contains("usage") && reply["usage"].is_object()) {
      const json& usage = reply["usage"];
      if (usage.contains("prompt_tokens") && usage["prompt_tokens"].is_number_integer()) {
        result.prompt_tokens = usage["prompt_tokens"].get<int64_t>();
      }
      if (usage.contains("completion_tokens") && usage["completion_tokens"].is_number_integer()) {
        result.completion_tokens = usage["completion_tokens"].get<int64_t>();
      }
    }
    return result;
  }
  throw TransportError("giving up after " + std::to_string(config_.max_attempts) +
                       " attempts: " + last_failure);
}

ReplayCompleter::ReplayCompleter(std::map<std::string, std::string> archive)
    : archive_(std::move(archive)) {}

ReplayCompleter ReplayCompleter::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open replay archive: " + path.string());
  std::map<std::string, std::string> archive;
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
    if (!rec.is_object() || !rec.contains("digest") || !rec["digest"].is_string() ||
        !rec.contains("response") || !rec["response"].is_string()) {
      throw SchemaError(where + "expected {\"digest\": string, \"response\": string}");
    }
    archive[rec["digest"].get<std::string>()] = rec["response"].get<std::string>();
  }
  return ReplayCompleter(std::move(archive));
}

GenerationResult ReplayCompleter::Complete(std::string_view prompt, const GenerationParams&) {
  GenerationResult result;
  result.digest = PromptDigest(prompt);
  auto it = archive_.find(result.digest);
  if (it == archive_.end()) {
    throw ReplayError("replay archive has no response for prompt digest " + result.digest);
  }
  result.raw_text = it->second;
  result.model = "replay";
  return result;
}

std::string ArchiveRecord(std::string_view digest, std::string_view response) {
  return json{{"digest", digest}, {"response", response}}.dump();
}

RunOutput RunEval(const std::vector<dataset::EvalExample>& examples, Completer& completer,
                  const RunConfig& cfg) {
  if (examples.empty()) throw UsageError("no examples to run");
  cfg.metric.Validate();
  std::vector<std::string> prompts;
  prompts.reserve(examples.size());
  for (const dataset::EvalExample& ex : examples) {
    prompts.push_back(BuildPrompt(ex, cfg.mode, cfg.assets).Render());
  }

  std::vector<GenerationResult> generations(examples.size());
  std::vector<metrics::ExampleRecord> records(examples.size());
  evaluation::ParallelFor(examples.size(), cfg.jobs, [&](size_t i) {
    const dataset::EvalExample& ex = examples[i];
    GenerationResult gen;
    try {
      gen = completer.Complete(prompts[i], cfg.params);
    } catch (const Error& e) {
      gen = GenerationResult{};
      gen.digest = PromptDigest(prompts[i]);
      gen.error = std::string(ErrorCodeName(e.code())) + ": " + e.what();
    }
    gen.id = ex.id;
    records[i] = metrics::EvaluateExample(ex.id, ex.context, ex.target, gen.raw_text, cfg.metric);
    records[i].error = gen.error;
    generations[i] = std::move(gen);
  });

  RunOutput out;
  out.report = metrics::Aggregate(std::move(records));
  std::sort(generations.begin(), generations.end(),
            [](const GenerationResult& a, const GenerationResult& b) { return a.id < b.id; });
  out.generations = std::move(generations);
  return out;
}

std::string GenerationsJsonl(const std::vector<GenerationResult>& generations) {
  std::string out;
  for (const GenerationResult& g : generations) {
    out += g.ToJson().dump();
    out += '\n';
  }
  return out;
}

}  // namespace repodsl::runner
