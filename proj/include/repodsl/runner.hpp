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

#pragma once

// Prompt construction and generation collection for the zero-shot and
// one-shot settings.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "repodsl/dataset.hpp"
#include "repodsl/metrics.hpp"

namespace repodsl::runner {

enum class PromptMode { kZeroShot, kOneShot };

std::string_view PromptModeName(PromptMode mode);
// Throws ValidationError.
PromptMode ParsePromptMode(std::string_view name);

struct Demonstration {
  std::string instruction;
  std::string output;
};

struct PromptAssets {
  std::optional<std::string> grammar_summary;
  std::optional<Demonstration> demonstration;
};

// Reads a demonstration file: {"instruction": str, "output": str | object}.
// An object output is stored in canonical form.
Demonstration LoadDemonstration(const std::filesystem::path& path);

struct PromptSpec {
  PromptMode mode = PromptMode::kZeroShot;
  std::optional<std::string> grammar_summary;
  std::optional<Demonstration> demonstration;
  std::string instruction;
  std::string context_document;

  // Blocks in fixed order: grammar, example instruction, example output,
  // instruction, context, then the output delimiter.
  std::string Render() const;
};

inline constexpr std::string_view kOutputDelimiter = "### Updated project\n";

// one_shot requires both assets and zero_shot forbids them; a mismatch
// throws ValidationError.
PromptSpec BuildPrompt(const dataset::EvalExample& example, PromptMode mode,
                       const PromptAssets& assets);

// Lowercase hex SHA-256 of the prompt bytes; replay archives key on it.
std::string PromptDigest(std::string_view prompt);

struct GenerationParams {
  int max_tokens = 4096;
  double temperature = 0.0;
  std::optional<int64_t> seed = 0;
};

struct EndpointConfig {
  std::string base_url;  // e.g. "http://127.0.0.1:8000/v1"
  std::string model;
  std::string token_env = "REPODSL_API_TOKEN";
  int max_in_flight = 4;
  int timeout_ms = 120000;
  int max_attempts = 3;
  int backoff_ms = 250;  // doubled after every failed attempt
};

struct GenerationResult {
  std::string id;
  std::string digest;
  std::string raw_text;  // verbatim, never trimmed
  int64_t latency_ms = 0;
  std::string model;
  std::optional<int64_t> prompt_tokens;
  std::optional<int64_t> completion_tokens;
  std::string error;

  nlohmann::json ToJson() const;
};

class Completer {
 public:
  virtual ~Completer() = default;
  // Throws TransportError, EndpointError or ReplayError.
  virtual GenerationResult Complete(std::string_view prompt,
                                    const GenerationParams& params) = 0;
};

// Chat-completions style HTTP(S) client. Transport failures, 429 and 5xx are
// retried with exponential backoff up to max_attempts in total, then raise
// TransportError; any other non-2xx status raises EndpointError with a body
// excerpt. At most max_in_flight requests run at once.
class HttpCompleter : public Completer {
 public:
  explicit HttpCompleter(EndpointConfig config);

  GenerationResult Complete(std::string_view prompt,
                            const GenerationParams& params) override;

  int peak_in_flight() const { return peak_.load(); }

 private:
  EndpointConfig config_;
  std::string scheme_host_port_;
  std::string path_;
  std::counting_semaphore<1024> slots_;
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_{0};
};

// Answers from an archive of {"digest": hex, "response": text} records.
class ReplayCompleter : public Completer {
 public:
  explicit ReplayCompleter(std::map<std::string, std::string> archive);
  // Throws IoError, SyntaxError, SchemaError.
  static ReplayCompleter Load(const std::filesystem::path& path);

  GenerationResult Complete(std::string_view prompt,
                            const GenerationParams& params) override;

 private:
  std::map<std::string, std::string> archive_;
};

std::string ArchiveRecord(std::string_view digest, std::string_view response);

struct RunConfig {
  PromptMode mode = PromptMode::kZeroShot;
  PromptAssets assets;
  GenerationParams params;
  metrics::MetricConfig metric;
  int jobs = 1;
};

struct RunOutput {
  metrics::MetricReport report;
  std::vector<GenerationResult> generations;  // sorted by id
};

// prompt -> complete -> evaluate for every example. A failed generation is
// scored as an empty (invalid) output and annotated; it never aborts the
// run. Throws UsageError on an empty corpus and ValidationError on a
// prompt/asset mismatch.
RunOutput RunEval(const std::vector<dataset::EvalExample>& examples,
                  Completer& completer, const RunConfig& cfg);

std::string GenerationsJsonl(const std::vector<GenerationResult>& generations);

}  // namespace repodsl::runner
