// include/uas/audit.hpp

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
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"
#include "uas/schema.hpp"

namespace uas::audit {

struct AuditField {
  std::string fieldPath;
  std::string value;  // "null" for absent values

  friend bool operator==(const AuditField&, const AuditField&) = default;
};

struct AuditTask {
  std::string taskId;
  std::string entryId;
  std::string audioRef;
  DomainTag domainTag = DomainTag::Speech;
  std::vector<AuditField> fields;
  std::vector<std::string> assignedAnnotators;

  friend bool operator==(const AuditTask&, const AuditTask&) = default;
};

nlohmann::ordered_json task_to_json(const AuditTask& task);
AuditTask task_from_json(const nlohmann::json& doc);
void write_audit_set(std::ostream& out, std::span<const AuditTask> tasks);
std::vector<AuditTask> read_audit_set(std::istream& in);
std::vector<AuditTask> read_audit_set_file(const std::string& path);

/// The nine (path, displayed value) pairs an annotator judges for a record.
std::vector<AuditField> render_fields(const UasRecord& record);

/// Stratified sample over domain tags. Per-stratum quotas are proportional
/// (floored, leftover units to the largest strata); entries inside a stratum
/// are drawn without replacement. Throws CorpusTooSmall.
std::vector<AuditTask> sample_audit_set(std::span<const CorpusEntry> corpus, std::size_t n,
                                        std::uint64_t seed,
                                        const std::vector<std::string>& roster = {});

/// Quota per stratum, in DomainTag order.
std::map<DomainTag, std::size_t> stratum_quotas(const std::map<DomainTag, std::size_t>& sizes,
                                               std::size_t n);

// ---------------------------------------------------------------------------

enum class JudgmentVerdict { Correct, Incorrect, Unsure };

std::string_view to_string(JudgmentVerdict verdict);
std::optional<JudgmentVerdict> judgment_verdict_from_string(std::string_view text);

struct AuditJudgment {
  std::string taskId;
  std::string annotatorId;
  std::string fieldPath;
  JudgmentVerdict verdict = JudgmentVerdict::Correct;
  std::int64_t submittedAt = 0;  // UTC seconds since epoch

  friend bool operator==(const AuditJudgment&, const AuditJudgment&) = default;
};

nlohmann::ordered_json judgment_to_json(const AuditJudgment& judgment);
/// Throws InvalidArgument on a malformed judgment.
AuditJudgment judgment_from_json(const nlohmann::json& doc);

std::string format_utc(std::int64_t seconds);
std::int64_t parse_utc(std::string_view text);

enum class Consensus { Correct, NotCorrect, Pending };

std::string_view to_string(Consensus consensus);

enum class UnsurePolicy {
  NotCorrect,  // Unsure counts against the field
  Abstain,     // Unsure is ignored; Correct needs more Correct than Incorrect
};

/// Majority vote for one (task, field). Pending until `required` verdicts exist.
Consensus consensus(std::span<const JudgmentVerdict> verdicts, int required = 3,
                    UnsurePolicy policy = UnsurePolicy::NotCorrect);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

inline constexpr double kZ95 = 1.959964;

/// Wilson score interval for a binomial proportion, clamped to [0, 1].
Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z = kZ95);

// ---------------------------------------------------------------------------

/// Latest verdict per (task, annotator, field), persisted as an append-only
/// JSON-Lines log. Opening replays the log; compact() rewrites it to one
/// line per live judgment. A torn final line is ignored on replay.
class JudgmentStore {
 public:
  JudgmentStore();  // in-memory only
  explicit JudgmentStore(std::filesystem::path logPath);

  JudgmentStore(const JudgmentStore&) = delete;
  JudgmentStore& operator=(const JudgmentStore&) = delete;

  void put(const AuditJudgment& judgment);
  void compact();

  std::vector<AuditJudgment> snapshot() const;
  std::vector<JudgmentVerdict> verdicts(std::string_view taskId, std::string_view fieldPath) const;
  std::optional<JudgmentVerdict> verdict(std::string_view taskId, std::string_view annotatorId,
                                         std::string_view fieldPath) const;
  std::size_t size() const;
  std::size_t log_lines() const;

 private:
  using Key = std::tuple<std::string, std::string, std::string>;  // task, field, annotator
  void replay();
  void append_line(const AuditJudgment& judgment);
  void compact_locked();

  mutable std::mutex mutex_;
  std::optional<std::filesystem::path> path_;
  std::ofstream log_;
  std::map<Key, AuditJudgment> latest_;
  std::size_t log_lines_ = 0;
};

struct FieldAccuracy {
  std::string fieldPath;
  std::string domain;       // "Paralinguistics" or "Non-linguistic Events"
  std::string displayName;  // "Age", "Discrete Events", ...
  std::size_t taskCount = 0;
  std::size_t n = 0;  // tasks with a settled consensus
  std::size_t successes = 0;
  std::size_t notCorrect = 0;
  std::size_t pending = 0;
  std::optional<double> accuracy;
  std::optional<Interval> ci;
  bool complete = false;  // no pending tasks

  nlohmann::ordered_json to_json() const;
};

struct ReportOptions {
  int requiredVotes = 3;
  UnsurePolicy unsurePolicy = UnsurePolicy::NotCorrect;
  double z = kZ95;
};

/// One row per auditable field in fixed order.
std::vector<FieldAccuracy> field_accuracy_report(const JudgmentStore& store,
                                                 std::span<const AuditTask> tasks,
                                                 const ReportOptions& options = {});

nlohmann::ordered_json report_to_json(std::span<const FieldAccuracy> rows);
/// Text table with Domain, Field, Accuracy (%), 95% CI columns.
std::string report_to_table(std::span<const FieldAccuracy> rows);

// ---------------------------------------------------------------------------

struct ServiceOptions {
  std::optional<std::filesystem::path> uiDir;
  // Closed roster: unknown annotators get 404. Empty means open.
  std::vector<std::string> roster;
  ReportOptions report;
};

/// HTTP service backing the annotation UI:
///   GET  /api/tasks/next?annotator=ID   next task with unjudged fields, 204 when done
///   POST /api/judgments                 one judgment; later submissions overwrite
///   GET  /api/progress                  per-annotator completion
///   GET  /api/report                    field accuracy rows as a JSON array
///   GET  /media/{entryId}               audio passthrough for local files
class AuditService {
 public:
  AuditService(std::vector<AuditTask> tasks, JudgmentStore& store, ServiceOptions options = {});
  ~AuditService();

  AuditService(const AuditService&) = delete;
  AuditService& operator=(const AuditService&) = delete;

  /// Binds host:port (port 0 picks a free port). Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(); returns false when the socket fails.
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace uas::audit
