// src/audit_service.cpp

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
#include <chrono>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "httplib.h"
#include "uas/audit.hpp"
#include "uas/error.hpp"

namespace uas::audit {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string_view display_name(std::string_view path) {
  static const std::unordered_map<std::string_view, std::string_view> names = {
      {"paralinguistics.age", "Age"},
      {"paralinguistics.gender", "Gender"},
      {"paralinguistics.emotion", "Emotion"},
      {"paralinguistics.accent", "Accent"},
      {"paralinguistics.prosody", "Prosody"},
      {"paralinguistics.timbre", "Timbre"},
      {"nonLinguisticEvents.description", "Description"},
      {"nonLinguisticEvents.discreteEvents", "Discrete Events"},
      {"nonLinguisticEvents.continuousEvents", "Continuous Events"},
  };
  auto it = names.find(path);
  return it == names.end() ? path : it->second;
}

std::string audio_mime(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".wav") return "audio/wav";
  if (ext == ".mp3") return "audio/mpeg";
  if (ext == ".flac") return "audio/flac";
  if (ext == ".ogg" || ext == ".opus") return "audio/ogg";
  if (ext == ".m4a") return "audio/mp4";
  return "application/octet-stream";
}

void send_json(httplib::Response& res, int status, const ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  ordered_json body;
  body["error"] = message;
  send_json(res, status, body);
}

std::int64_t now_utc_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

struct AuditService::Impl {
  std::vector<AuditTask> tasks;
  std::unordered_map<std::string, std::size_t> task_index;
  JudgmentStore& store;
  ServiceOptions options;
  httplib::Server server;

  Impl(std::vector<AuditTask> t, JudgmentStore& s, ServiceOptions o)
      : tasks(std::move(t)), store(s), options(std::move(o)) {
    for (std::size_t i = 0; i < tasks.size(); ++i) task_index.emplace(tasks[i].taskId, i);
    routes();
  }

  bool roster_closed() const { return !options.roster.empty(); }

  bool on_roster(const std::string& annotator) const {
    return std::find(options.roster.begin(), options.roster.end(), annotator) != options.roster.end();
  }

  static bool assigned(const AuditTask& task, const std::string& annotator) {
    return task.assignedAnnotators.empty() ||
           std::find(task.assignedAnnotators.begin(), task.assignedAnnotators.end(), annotator) !=
               task.assignedAnnotators.end();
  }

  int required_votes() const { return options.report.requiredVotes; }

  // (task -> annotator -> fields judged), from one consistent store snapshot.
  using Coverage = std::unordered_map<std::string, std::map<std::string, std::size_t>>;
  Coverage coverage() const {
    Coverage out;
    for (const auto& j : store.snapshot()) ++out[j.taskId][j.annotatorId];
    return out;
  }

  ordered_json task_view(const AuditTask& task, const std::string& annotator, std::size_t judged_tasks) const {
    ordered_json doc;
    doc["taskId"] = task.taskId;
    doc["entryId"] = task.entryId;
    doc["audioRef"] = task.audioRef;
    doc["audioUrl"] = "/media/" + httplib::detail::encode_query_param(task.entryId);
    doc["domainTag"] = std::string(to_string(task.domainTag));
    ordered_json fields = ordered_json::array();
    for (const auto& f : task.fields) {
      ordered_json item;
      item["fieldPath"] = f.fieldPath;
      item["label"] = std::string(display_name(f.fieldPath));
      item["value"] = f.value;
      auto verdict = store.verdict(task.taskId, annotator, f.fieldPath);
      item["currentVerdict"] = verdict ? ordered_json(std::string(to_string(*verdict))) : ordered_json(nullptr);
      fields.push_back(std::move(item));
    }
    doc["fields"] = std::move(fields);
    ordered_json progress;
    progress["judgedTasks"] = judged_tasks;
    progress["totalTasks"] = tasks.size();
    doc["progress"] = std::move(progress);
    return doc;
  }

  void next_task(const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("annotator") || req.get_param_value("annotator").empty())
      return send_error(res, 400, "missing annotator query parameter");
    const std::string annotator = req.get_param_value("annotator");
    if (roster_closed() && !on_roster(annotator)) return send_error(res, 404, "unknown annotator");

    const Coverage cov = coverage();
    std::size_t judged_tasks = 0;
    const AuditTask* next = nullptr;
    for (const auto& task : tasks) {
      std::size_t mine = 0;
      std::size_t others = 0;
      if (auto it = cov.find(task.taskId); it != cov.end()) {
        for (const auto& [who, count] : it->second) {
          if (who == annotator) mine = count;
          else ++others;
        }
      }
      if (mine >= task.fields.size()) {
        ++judged_tasks;
        continue;
      }
      if (next || !assigned(task, annotator)) continue;
      // Open assignment: a task stops taking new annotators once fully staffed.
      if (task.assignedAnnotators.empty() && mine == 0 &&
          others >= static_cast<std::size_t>(required_votes()))
        continue;
      next = &task;
    }
    if (!next) {
      res.status = 204;
      return;
    }
    send_json(res, 200, task_view(*next, annotator, judged_tasks));
  }

  void post_judgment(const httplib::Request& req, httplib::Response& res) {
    json doc = json::parse(req.body, nullptr, false);
    if (doc.is_discarded()) return send_error(res, 400, "body is not JSON");
    AuditJudgment judgment;
    try {
      judgment = judgment_from_json(doc);
    } catch (const Error& e) {
      return send_error(res, 400, e.what());
    }
    auto it = task_index.find(judgment.taskId);
    if (it == task_index.end()) return send_error(res, 409, "unknown taskId '" + judgment.taskId + "'");
    const AuditTask& task = tasks[it->second];
    const bool known_field = std::any_of(task.fields.begin(), task.fields.end(),
                                         [&](const AuditField& f) { return f.fieldPath == judgment.fieldPath; });
    if (!known_field) return send_error(res, 409, "unknown fieldPath '" + judgment.fieldPath + "'");
    if (roster_closed() && !on_roster(judgment.annotatorId)) return send_error(res, 404, "unknown annotator");
    if (!doc.contains("submittedAt") || doc["submittedAt"].is_null()) judgment.submittedAt = now_utc_seconds();
    try {
      store.put(judgment);
    } catch (const Error& e) {
      return send_error(res, 500, e.what());
    }
    send_json(res, 200, judgment_to_json(judgment));
  }

  void progress(httplib::Response& res) {
    const Coverage cov = coverage();
    std::map<std::string, std::pair<std::size_t, std::size_t>> per;  // tasks, fields
    for (const auto& id : options.roster) per[id];
    for (const auto& task : tasks) {
      auto it = cov.find(task.taskId);
      if (it == cov.end()) continue;
      for (const auto& [who, count] : it->second) {
        auto& entry = per[who];
        entry.second += count;
        if (count >= task.fields.size()) ++entry.first;
      }
    }
    ordered_json annotators = ordered_json::array();
    for (const auto& [who, counts] : per) {
      ordered_json item;
      item["annotatorId"] = who;
      item["judgedTasks"] = counts.first;
      item["judgedFields"] = counts.second;
      annotators.push_back(std::move(item));
    }
    ordered_json body;
    body["totalTasks"] = tasks.size();
    body["annotators"] = std::move(annotators);
    send_json(res, 200, body);
  }

  void media(const httplib::Request& req, httplib::Response& res) {
    const std::string entry_id = req.matches[1];
    auto it = std::find_if(tasks.begin(), tasks.end(), [&](const AuditTask& t) { return t.entryId == entry_id; });
    if (it == tasks.end()) return send_error(res, 404, "unknown entry");
    const std::filesystem::path path(it->audioRef);
    std::ifstream in(path, std::ios::binary);
    if (it->audioRef.find("://") != std::string::npos || !in)
      return send_error(res, 404, "audio is not available locally");
    std::ostringstream data;
    data << in.rdbuf();
    res.set_content(data.str(), audio_mime(path));
  }

  void routes() {
    server.Get("/api/tasks/next", [this](const httplib::Request& req, httplib::Response& res) { next_task(req, res); });
    server.Post("/api/judgments", [this](const httplib::Request& req, httplib::Response& res) { post_judgment(req, res); });
    server.Get("/api/progress", [this](const httplib::Request&, httplib::Response& res) { progress(res); });
    server.Get("/api/report", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, report_to_json(field_accuracy_report(store, tasks, options.report)));
    });
    server.Get(R"(/media/(.+))", [this](const httplib::Request& req, httplib::Response& res) { media(req, res); });
    if (options.uiDir) server.set_mount_point("/", options.uiDir->string());
  }
};

AuditService::AuditService(std::vector<AuditTask> tasks, JudgmentStore& store, ServiceOptions options)
    : impl_(std::make_unique<Impl>(std::move(tasks), store, std::move(options))) {}

AuditService::~AuditService() { stop(); }

int AuditService::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool AuditService::listen_after_bind() { return impl_->server.listen_after_bind(); }

void AuditService::stop() {
  if (impl_) impl_->server.stop();
}

void AuditService::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace uas::audit
