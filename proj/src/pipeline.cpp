// src/pipeline.cpp

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

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <set>
#include <thread>
#include <variant>

#include "uas/error.hpp"
#include "uas/synthesis.hpp"

namespace uas {

using nlohmann::ordered_json;

ordered_json PipelineRunSummary::to_json() const {
  ordered_json doc;
  doc["total"] = total;
  doc["captioned"] = captioned;
  doc["synthesized"] = synthesized;
  doc["accepted"] = accepted;
  doc["rejected"] = rejected;
  doc["backendFailures"] = backendFailures;
  ordered_json codes = ordered_json::object();
  for (const auto& [code, count] : rejectionsByCode) codes[code] = count;
  doc["rejectionsByCode"] = std::move(codes);
  return doc;
}

ordered_json PipelineFailure::to_json() const {
  ordered_json doc;
  doc["recordId"] = recordId;
  doc["stage"] = stage;
  doc["error"] = error;
  doc["attempts"] = attempts;
  return doc;
}

namespace {

// Caps concurrent backend calls for backends that are not fully reentrant.
class CallGate {
 public:
  explicit CallGate(int limit) : limit_(limit) {}

  template <typename Fn>
  auto run(Fn&& fn) {
    if (limit_ <= 0) return fn();
    {
      std::unique_lock lock(mutex_);
      cv_.wait(lock, [&] { return in_flight_ < limit_; });
      ++in_flight_;
    }
    struct Release {
      CallGate* gate;
      ~Release() {
        {
          std::lock_guard lock(gate->mutex_);
          --gate->in_flight_;
        }
        gate->cv_.notify_one();
      }
    } release{this};
    return fn();
  }

 private:
  int limit_;
  int in_flight_ = 0;
  std::mutex mutex_;
  std::condition_variable cv_;
};

class GatedBackend : public ModelBackend {
 public:
  GatedBackend(ModelBackend& inner, int limit) : inner_(inner), gate_(limit) {}
  std::string complete(const ModelRequest& request) override {
    return gate_.run([&] { return inner_.complete(request); });
  }

 private:
  ModelBackend& inner_;
  CallGate gate_;
};

struct Outcome {
  bool captioned = false;
  bool synthesized = false;
  std::variant<CorpusEntry, ValidationReport, PipelineFailure> result;
};

Outcome process_entry(const CorpusEntry& entry, ModelBackend& backend,
                      const PipelineOptions& options) {
  Outcome outcome;
  auto fail = [&](const char* stage, std::string error, int attempts) {
    outcome.result = PipelineFailure{entry.id, stage, std::move(error), attempts};
    return outcome;
  };

  // Stage 1
  std::string caption;
  try {
    const ModelRequest request = build_caption_request(entry, options.requests);
    caption = complete_with_retry(backend, request, options.maxRetries).text;
  } catch (const BackendError& e) {
    const int attempts = e.kind() == BackendErrorKind::AuthFailure ? 1 : options.maxRetries + 1;
    return fail("caption", std::string(to_string(e.kind())) + ": " + e.what(), attempts);
  } catch (const Error& e) {
    return fail("caption", std::string(to_string(e.code())) + ": " + e.what(), 0);
  }
  outcome.captioned = true;

  // Stage 2 and 3; a rejected record may be re-sampled retryRejected times.
  for (int sample = 0; sample <= options.retryRejected; ++sample) {
    ModelRequest request;
    try {
      request = build_synthesis_request(caption, entry.groundTruthTranscription, options.requests);
    } catch (const Error& e) {
      return fail("synthesis", std::string(to_string(e.code())) + ": " + e.what(), 0);
    }
    request.entryId = entry.id;
    if (sample > 0) request.temperature = options.retryTemperature;

    std::optional<UasRecord> record;
    std::string last_error;
    int attempts = 0;
    while (!record && attempts <= options.maxRetries) {
      ++attempts;
      try {
        const std::string output = backend.complete(request);
        record = parse_uas(extract_json(output), options.parse);
      } catch (const BackendError& e) {
        last_error = std::string(to_string(e.kind())) + ": " + e.what();
        if (e.kind() == BackendErrorKind::AuthFailure) break;
      } catch (const Error& e) {
        last_error = std::string(to_string(e.code())) + ": " + e.what();
      }
    }
    if (!record) return fail("synthesis", last_error, attempts);
    outcome.synthesized = true;

    CorpusEntry candidate = entry;
    candidate.uas = std::move(*record);
    ValidationReport report = validate_entry(candidate, options.ontology, options.thresholds, options.validation);
    if (report.verdict == Verdict::Accept) {
      outcome.result = std::move(candidate);
      return outcome;
    }
    outcome.result = std::move(report);
  }
  return outcome;
}

}  // namespace

PipelineRunSummary run_pipeline(std::span<const CorpusEntry> manifest, ModelBackend& backend,
                                const PipelineOptions& options, const PipelineSinks& sinks) {
  if (options.workerCount < 1)
    throw Error(ErrorCode::InvalidArgument, "workerCount must be at least 1");
  if (options.maxRetries < 0 || options.retryRejected < 0)
    throw Error(ErrorCode::InvalidArgument, "retry counts must be non-negative");

  GatedBackend gated(backend, backend.max_concurrency());
  const std::size_t total = manifest.size();
  std::vector<std::optional<Outcome>> slots(total);
  std::mutex mutex;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
      Outcome outcome;
      try {
        outcome = process_entry(manifest[i], gated, options);
      } catch (const std::exception& e) {
        outcome.result = PipelineFailure{manifest[i].id, "internal", e.what(), 0};
      }
      {
        std::lock_guard lock(mutex);
        slots[i] = std::move(outcome);
      }
      ready.notify_all();
    }
  };

  const std::size_t thread_count =
      std::min<std::size_t>(static_cast<std::size_t>(options.workerCount), std::max<std::size_t>(total, 1));
  std::vector<std::jthread> pool;
  pool.reserve(thread_count);
  for (std::size_t t = 0; t < thread_count; ++t) pool.emplace_back(worker);

  // Single writer: drain slots strictly in manifest order.
  PipelineRunSummary summary;
  summary.total = total;
  for (std::size_t i = 0; i < total; ++i) {
    Outcome outcome;
    {
      std::unique_lock lock(mutex);
      ready.wait(lock, [&] { return slots[i].has_value(); });
      outcome = std::move(*slots[i]);
      slots[i].reset();
    }
    summary.captioned += outcome.captioned;
    summary.synthesized += outcome.synthesized;
    if (auto* accepted = std::get_if<CorpusEntry>(&outcome.result)) {
      ++summary.accepted;
      if (sinks.accepted) *sinks.accepted << serialize_entry(*accepted) << '\n';
    } else if (auto* report = std::get_if<ValidationReport>(&outcome.result)) {
      ++summary.rejected;
      std::set<std::string_view> codes;
      for (const auto& v : report->violations) codes.insert(to_string(v.code));
      for (auto code : codes) ++summary.rejectionsByCode[std::string(code)];
      if (sinks.rejected) *sinks.rejected << serialize_report(*report) << '\n';
    } else {
      ++summary.backendFailures;
      const auto& failure = std::get<PipelineFailure>(outcome.result);
      if (sinks.failures)
        *sinks.failures << failure.to_json().dump(-1, ' ', false, ordered_json::error_handler_t::replace)
                        << '\n';
    }
  }
  return summary;
}

}  // namespace uas
