// include/uas/synthesis.hpp

// Copyright 2026 The UAS Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "uas/schema.hpp"
#include "uas/validation.hpp"

namespace uas {

enum class RequestKind { Caption, Synthesis, QaGen };

std::string_view to_string(RequestKind kind);

struct ModelRequest {
  RequestKind kind = RequestKind::Caption;
  std::string prompt;
  std::optional<std::string> audioRef;  // Caption requests only
  int maxOutputTokens = 1024;
  double temperature = 0.0;
  // Routing tag for fixture lookup and logs; not part of the prompt.
  std::string entryId;
};

/// Throws InvalidArgument when the audio attachment rule or numeric bounds fail.
void check_request(const ModelRequest& request);

/// Replaces every ${name} placeholder. Unknown placeholders are an error so
/// that a template/argument mismatch cannot go unnoticed.
std::string render_template(std::string_view tpl,
                            const std::map<std::string, std::string, std::less<>>& values);

/// The caption prompt. No upstream captioner prompt is available, so this text
/// is a reconstruction covering the six speaker attributes and the scene.
extern const std::string_view kCaptionPromptTemplate;
/// The caption-to-UAS conversion prompt, verbatim.
extern const std::string_view kSynthesisPromptTemplate;
/// The UAS-to-QA prompt with ${correct_option} and ${uas} placeholders, verbatim.
extern const std::string_view kQaPromptTemplate;

struct RequestDefaults {
  int captionMaxTokens = 1024;
  int synthesisMaxTokens = 2048;
  double captionTemperature = 0.7;
  double synthesisTemperature = 0.0;
};

ModelRequest build_caption_request(const CorpusEntry& entry, const RequestDefaults& defaults = {});
ModelRequest build_synthesis_request(std::string_view caption,
                                     const std::optional<std::string>& groundTruth,
                                     const RequestDefaults& defaults = {});

/// Returns the first balanced top-level JSON object embedded in model output,
/// skipping code fences and surrounding prose. Throws NoJsonFound.
std::string extract_json(std::string_view modelOutput);

// ---------------------------------------------------------------------------
// Backends

enum class BackendErrorKind { Timeout, AuthFailure, RemoteError };

std::string_view to_string(BackendErrorKind kind);

class BackendError : public std::runtime_error {
 public:
  BackendError(BackendErrorKind kind, const std::string& message, int status = 0,
               std::string body = {})
      : std::runtime_error(message), kind_(kind), status_(status), body_(std::move(body)) {}

  BackendErrorKind kind() const noexcept { return kind_; }
  int status() const noexcept { return status_; }
  const std::string& body() const noexcept { return body_; }

 private:
  BackendErrorKind kind_;
  int status_;
  std::string body_;
};

class ModelBackend {
 public:
  virtual ~ModelBackend() = default;

  /// Raw model output for a request. Throws BackendError.
  virtual std::string complete(const ModelRequest& request) = 0;

  /// Maximum concurrent complete() calls; 0 means unlimited.
  virtual int max_concurrency() const { return 0; }
};

struct BackendConfig {
  std::string endpointUrl;
  std::string modelName;
  std::string authTokenEnvVar = "UAS_API_TOKEN";
  double timeoutSeconds = 60.0;
  int maxRetries = 2;
  int concurrencyLimit = 0;

  void check() const;
  static BackendConfig from_json(const nlohmann::json& doc);
};

/// Reads fixtures from <dir>/<kind>/<entryId>.txt with kind in
/// {caption, synthesis, qagen}. Files are loaded once and cached.
class MockBackend : public ModelBackend {
 public:
  explicit MockBackend(std::filesystem::path fixtureDir);

  std::string complete(const ModelRequest& request) override;

 private:
  std::filesystem::path dir_;
  std::mutex mutex_;
  std::unordered_map<std::string, std::string> cache_;
};

/// POSTs {model, prompt, audio_ref?, max_tokens, temperature} as JSON with a
/// bearer token taken from the configured environment variable. A JSON reply
/// with a string "text" member yields that member; any other body is
/// returned verbatim.
class HttpBackend : public ModelBackend {
 public:
  explicit HttpBackend(BackendConfig config);

  std::string complete(const ModelRequest& request) override;
  int max_concurrency() const override { return config_.concurrencyLimit; }

  const BackendConfig& config() const { return config_; }

 private:
  BackendConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

struct CompletionResult {
  std::string text;
  int attempts = 0;
};

/// Calls the backend up to 1 + maxRetries times; rethrows the last
/// BackendError once attempts are exhausted. AuthFailure is not retried.
CompletionResult complete_with_retry(ModelBackend& backend, const ModelRequest& request,
                                     int maxRetries);

// ---------------------------------------------------------------------------
// Pipeline

struct PipelineOptions {
  Ontology ontology;
  AlignmentThresholds thresholds;
  ValidationOptions validation;
  ParseOptions parse;
  RequestDefaults requests;
  int workerCount = 1;
  int maxRetries = 2;
  // Extra Stage-2 samples drawn for a rejected record before it is dropped.
  int retryRejected = 0;
  double retryTemperature = 0.7;
};

struct PipelineRunSummary {
  std::size_t total = 0;
  std::size_t captioned = 0;
  std::size_t synthesized = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t backendFailures = 0;
  std::map<std::string, std::size_t> rejectionsByCode;

  nlohmann::ordered_json to_json() const;
  friend bool operator==(const PipelineRunSummary&, const PipelineRunSummary&) = default;
};

/// An entry that never reached validation.
struct PipelineFailure {
  std::string recordId;
  std::string stage;
  std::string error;
  int attempts = 0;

  nlohmann::ordered_json to_json() const;
};

/// Output sinks; any may be null. Lines are written in manifest order.
struct PipelineSinks {
  std::ostream* accepted = nullptr;
  std::ostream* rejected = nullptr;
  std::ostream* failures = nullptr;
};

/// Runs Stage 1 -> Stage 2 -> extraction -> Stage 3 for every entry on a
/// bounded worker pool. Per-entry problems are logged, never thrown.
PipelineRunSummary run_pipeline(std::span<const CorpusEntry> manifest, ModelBackend& backend,
                                const PipelineOptions& options, const PipelineSinks& sinks);

}  // namespace uas
