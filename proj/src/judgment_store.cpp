// src/judgment_store.cpp

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

#include <cstdio>
#include <fstream>

#include "uas/audit.hpp"
#include "uas/error.hpp"

namespace uas::audit {

using nlohmann::json;

namespace {

// Rewrite the log once it holds this many superseded lines per live judgment.
constexpr std::size_t kCompactionRatio = 4;
constexpr std::size_t kCompactionSlack = 256;

[[noreturn]] void store_error(const std::string& message) {
  throw Error(ErrorCode::StoreError, message);
}

}  // namespace

JudgmentStore::JudgmentStore() = default;

JudgmentStore::JudgmentStore(std::filesystem::path logPath) : path_(std::move(logPath)) {
  replay();
  log_.open(*path_, std::ios::app | std::ios::binary);
  if (!log_) store_error("cannot open judgment log '" + path_->string() + "' for writing");
}

void JudgmentStore::replay() {
  std::ifstream in(*path_, std::ios::binary);
  if (!in) return;
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(std::move(line));
  bool torn_tail = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    json doc = json::parse(lines[i], nullptr, false);
    AuditJudgment judgment;
    bool ok = !doc.is_discarded();
    if (ok) {
      try {
        judgment = judgment_from_json(doc);
      } catch (const Error&) {
        ok = false;
      }
    }
    if (!ok) {
      // Only the final line can be a partial write.
      if (i + 1 == lines.size()) {
        torn_tail = true;
        break;
      }
      store_error("judgment log '" + path_->string() + "' is corrupt at line " + std::to_string(i + 1));
    }
    latest_[{judgment.taskId, judgment.fieldPath, judgment.annotatorId}] = judgment;
    ++log_lines_;
  }
  in.close();
  if (torn_tail) compact_locked();
}

void JudgmentStore::append_line(const AuditJudgment& judgment) {
  if (!path_) return;
  log_ << judgment_to_json(judgment).dump() << '\n';
  log_.flush();
  if (!log_) store_error("failed to append to judgment log '" + path_->string() + "'");
  ++log_lines_;
}

void JudgmentStore::put(const AuditJudgment& judgment) {
  std::lock_guard lock(mutex_);
  append_line(judgment);
  latest_[{judgment.taskId, judgment.fieldPath, judgment.annotatorId}] = judgment;
  if (path_ && log_lines_ > kCompactionRatio * latest_.size() + kCompactionSlack) {
    compact_locked();
  }
}

void JudgmentStore::compact() {
  std::lock_guard lock(mutex_);
  compact_locked();
}

void JudgmentStore::compact_locked() {
  if (!path_) return;
  const bool reopen = log_.is_open();
  if (reopen) log_.close();
  const std::filesystem::path tmp = path_->string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    if (!out) store_error("cannot write '" + tmp.string() + "'");
    for (const auto& [key, judgment] : latest_) out << judgment_to_json(judgment).dump() << '\n';
    out.flush();
    if (!out) store_error("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, *path_, ec);
  if (ec) store_error("cannot replace judgment log: " + ec.message());
  log_lines_ = latest_.size();
  if (reopen) log_.open(*path_, std::ios::app | std::ios::binary);
}

std::vector<AuditJudgment> JudgmentStore::snapshot() const {
  std::lock_guard lock(mutex_);
  std::vector<AuditJudgment> out;
  out.reserve(latest_.size());
  for (const auto& [key, judgment] : latest_) out.push_back(judgment);
  return out;
}

std::vector<JudgmentVerdict> JudgmentStore::verdicts(std::string_view taskId,
                                                     std::string_view fieldPath) const {
  std::lock_guard lock(mutex_);
  std::vector<JudgmentVerdict> out;
  const Key first{std::string(taskId), std::string(fieldPath), std::string()};
  for (auto it = latest_.lower_bound(first);
       it != latest_.end() && std::get<0>(it->first) == taskId && std::get<1>(it->first) == fieldPath; ++it)
    out.push_back(it->second.verdict);
  return out;
}

std::optional<JudgmentVerdict> JudgmentStore::verdict(std::string_view taskId, std::string_view annotatorId,
                                                      std::string_view fieldPath) const {
  std::lock_guard lock(mutex_);
  auto it = latest_.find(Key{std::string(taskId), std::string(fieldPath), std::string(annotatorId)});
  if (it == latest_.end()) return std::nullopt;
  return it->second.verdict;
}

std::size_t JudgmentStore::size() const {
  std::lock_guard lock(mutex_);
  return latest_.size();
}

std::size_t JudgmentStore::log_lines() const {
  std::lock_guard lock(mutex_);
  return log_lines_;
}

}  // namespace uas::audit
