// src/backend.cpp

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

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "uas/error.hpp"
#include "uas/synthesis.hpp"

namespace uas {

using nlohmann::json;

std::string_view to_string(BackendErrorKind kind) {
  switch (kind) {
    case BackendErrorKind::Timeout: return "Timeout";
    case BackendErrorKind::AuthFailure: return "AuthFailure";
    case BackendErrorKind::RemoteError: return "RemoteError";
  }
  return "RemoteError";
}

void BackendConfig::check() const {
  if (!(timeoutSeconds > 0.0) || !std::isfinite(timeoutSeconds))
    throw Error(ErrorCode::ConfigError, "timeoutSeconds must be positive");
  if (maxRetries < 0) throw Error(ErrorCode::ConfigError, "maxRetries must be non-negative");
  if (concurrencyLimit < 0) throw Error(ErrorCode::ConfigError, "concurrencyLimit must be non-negative");
}

BackendConfig BackendConfig::from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::ConfigError, "backend config must be an object");
  BackendConfig config;
  try {
    config.endpointUrl = doc.value("endpointUrl", config.endpointUrl);
    config.modelName = doc.value("modelName", config.modelName);
    config.authTokenEnvVar = doc.value("authTokenEnvVar", config.authTokenEnvVar);
    config.timeoutSeconds = doc.value("timeoutSeconds", config.timeoutSeconds);
    config.maxRetries = doc.value("maxRetries", config.maxRetries);
    config.concurrencyLimit = doc.value("concurrencyLimit", config.concurrencyLimit);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("invalid backend config: ") + e.what());
  }
  config.check();
  return config;
}

// ---------------------------------------------------------------------------

MockBackend::MockBackend(std::filesystem::path fixtureDir) : dir_(std::move(fixtureDir)) {}

std::string MockBackend::complete(const ModelRequest& request) {
  const std::string key = std::string(to_string(request.kind)) + "/" + request.entryId + ".txt";
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  std::ifstream in(dir_ / key, std::ios::binary);
  if (!in) throw BackendError(BackendErrorKind::RemoteError, "no fixture " + key, 404);
  std::ostringstream text;
  text << in.rdbuf();
  std::lock_guard lock(mutex_);
  return cache_.emplace(key, text.str()).first->second;
}

// ---------------------------------------------------------------------------

HttpBackend::HttpBackend(BackendConfig config) : config_(std::move(config)) {
  config_.check();
  const std::string& url = config_.endpointUrl;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw Error(ErrorCode::ConfigError, "endpointUrl must include a scheme: '" + url + "'");
  const auto path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

std::string HttpBackend::complete(const ModelRequest& request) {
  httplib::Headers headers;
  if (!config_.authTokenEnvVar.empty()) {
    const char* token = std::getenv(config_.authTokenEnvVar.c_str());
    if (!token || !*token)
      throw BackendError(BackendErrorKind::AuthFailure,
                         "credential variable " + config_.authTokenEnvVar + " is not set");
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  json body;
  body["model"] = config_.modelName;
  body["prompt"] = request.prompt;
  if (request.audioRef) body["audio_ref"] = *request.audioRef;
  body["max_tokens"] = request.maxOutputTokens;
  body["temperature"] = request.temperature;

  httplib::Client client(scheme_host_port_);
  const auto timeout = std::chrono::duration<double>(config_.timeoutSeconds);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout);
  client.set_connection_timeout(micros);
  client.set_read_timeout(micros);
  client.set_write_timeout(micros);

  auto result = client.Post(path_, headers, body.dump(), "application/json");
  if (!result) {
    const auto err = result.error();
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read)
      throw BackendError(BackendErrorKind::Timeout, "request timed out: " + httplib::to_string(err));
    throw BackendError(BackendErrorKind::RemoteError, "transport failure: " + httplib::to_string(err));
  }
  if (result->status == 401 || result->status == 403)
    throw BackendError(BackendErrorKind::AuthFailure,
                       "endpoint rejected credential (" + std::to_string(result->status) + ")",
                       result->status, result->body);
  if (result->status < 200 || result->status >= 300)
    throw BackendError(BackendErrorKind::RemoteError,
                       "endpoint returned status " + std::to_string(result->status), result->status,
                       result->body);

  json reply = json::parse(result->body, nullptr, false);
  if (reply.is_object()) {
    if (auto it = reply.find("text"); it != reply.end() && it->is_string())
      return it->get<std::string>();
  }
  return result->body;
}

CompletionResult complete_with_retry(ModelBackend& backend, const ModelRequest& request,
                                     int maxRetries) {
  CompletionResult result;
  for (;;) {
    ++result.attempts;
    try {
      result.text = backend.complete(request);
      return result;
    } catch (const BackendError& e) {
      if (e.kind() == BackendErrorKind::AuthFailure || result.attempts > maxRetries) throw;
    }
  }
}

}  // namespace uas
