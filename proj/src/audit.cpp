// src/audit.cpp

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

#include "uas/audit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <sstream>

#include "uas/error.hpp"
#include "uas/random.hpp"

namespace uas::audit {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct FieldInfo {
  std::string_view path;
  std::string_view domain;
  std::string_view display;
};

constexpr std::array<FieldInfo, 9> kFieldInfo = {{
    {"paralinguistics.age", "Paralinguistics", "Age"},
    {"paralinguistics.gender", "Paralinguistics", "Gender"},
    {"paralinguistics.emotion", "Paralinguistics", "Emotion"},
    {"paralinguistics.accent", "Paralinguistics", "Accent"},
    {"paralinguistics.prosody", "Paralinguistics", "Prosody"},
    {"paralinguistics.timbre", "Paralinguistics", "Timbre"},
    {"nonLinguisticEvents.description", "Non-linguistic Events", "Description"},
    {"nonLinguisticEvents.discreteEvents", "Non-linguistic Events", "Discrete Events"},
    {"nonLinguisticEvents.continuousEvents", "Non-linguistic Events", "Continuous Events"},
}};

std::string render_events(const std::vector<AcousticEvent>& events) {
  if (events.empty()) return "none";
  std::string out;
  for (const auto& e : events) {
    if (!out.empty()) out += "; ";
    out += e.label + " (" + e.characteristic + ")";
  }
  return out;
}

[[noreturn]] void invalid(const std::string& message) {
  throw Error(ErrorCode::InvalidArgument, message);
}

}  // namespace

std::vector<AuditField> render_fields(const UasRecord& record) {
  std::vector<AuditField> fields;
  for (std::string_view path : kParalinguisticFields) {
    const auto& value = *paralinguistic_field(record, path);
    fields.push_back({std::string(path), value ? *value : "null"});
  }
  const auto& scene = record.nonLinguisticEvents;
  fields.push_back({"nonLinguisticEvents.description", scene.description});
  fields.push_back({"nonLinguisticEvents.discreteEvents", render_events(scene.discreteEvents)});
  fields.push_back({"nonLinguisticEvents.continuousEvents", render_events(scene.continuousEvents)});
  return fields;
}

ordered_json task_to_json(const AuditTask& task) {
  ordered_json doc;
  doc["taskId"] = task.taskId;
  doc["entryId"] = task.entryId;
  doc["audioRef"] = task.audioRef;
  doc["domainTag"] = std::string(to_string(task.domainTag));
  ordered_json fields = ordered_json::array();
  for (const auto& f : task.fields) {
    ordered_json item;
    item["fieldPath"] = f.fieldPath;
    item["value"] = f.value;
    fields.push_back(std::move(item));
  }
  doc["fields"] = std::move(fields);
  doc["assignedAnnotators"] = task.assignedAnnotators;
  return doc;
}

AuditTask task_from_json(const json& doc) {
  try {
    AuditTask task;
    task.taskId = doc.at("taskId").get<std::string>();
    task.entryId = doc.at("entryId").get<std::string>();
    task.audioRef = doc.at("audioRef").get<std::string>();
    task.domainTag = domain_tag_from_string(doc.at("domainTag").get<std::string>());
    for (const auto& item : doc.at("fields"))
      task.fields.push_back({item.at("fieldPath").get<std::string>(), item.at("value").get<std::string>()});
    if (doc.contains("assignedAnnotators"))
      task.assignedAnnotators = doc.at("assignedAnnotators").get<std::vector<std::string>>();
    return task;
  } catch (const json::exception& e) {
    invalid(std::string("invalid audit task: ") + e.what());
  }
}

void write_audit_set(std::ostream& out, std::span<const AuditTask> tasks) {
  for (const auto& task : tasks) out << task_to_json(task).dump() << '\n';
}

std::vector<AuditTask> read_audit_set(std::istream& in) {
  std::vector<AuditTask> tasks;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded()) invalid("audit set line " + std::to_string(line_no) + ": malformed JSON");
    try {
      tasks.push_back(task_from_json(doc));
    } catch (const Error& e) {
      invalid("audit set line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return tasks;
}

std::vector<AuditTask> read_audit_set_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot open audit set '" + path + "'");
  return read_audit_set(in);
}

std::map<DomainTag, std::size_t> stratum_quotas(const std::map<DomainTag, std::size_t>& sizes,
                                               std::size_t n) {
  std::size_t total = 0;
  for (const auto& [tag, size] : sizes) total += size;
  if (n > total)
    throw Error(ErrorCode::CorpusTooSmall,
                "cannot sample " + std::to_string(n) + " from " + std::to_string(total) + " entries");
  std::map<DomainTag, std::size_t> quotas;
  std::size_t assigned = 0;
  for (const auto& [tag, size] : sizes) {
    quotas[tag] = total == 0 ? 0 : n * size / total;
    assigned += quotas[tag];
  }
  std::vector<DomainTag> by_size;
  for (const auto& [tag, size] : sizes) by_size.push_back(tag);
  std::stable_sort(by_size.begin(), by_size.end(),
                   [&](DomainTag a, DomainTag b) { return sizes.at(a) > sizes.at(b); });
  while (assigned < n) {
    for (DomainTag tag : by_size) {
      if (assigned == n) break;
      if (quotas[tag] < sizes.at(tag)) {
        ++quotas[tag];
        ++assigned;
      }
    }
  }
  return quotas;
}

std::vector<AuditTask> sample_audit_set(std::span<const CorpusEntry> corpus, std::size_t n,
                                        std::uint64_t seed, const std::vector<std::string>& roster) {
  if (n == 0) invalid("audit sample size must be positive");
  if (!roster.empty() && roster.size() % 2 == 0)
    invalid("annotator roster must have an odd size so that a majority exists");

  std::map<DomainTag, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < corpus.size(); ++i) strata[corpus[i].domainTag].push_back(i);
  std::map<DomainTag, std::size_t> sizes;
  for (const auto& [tag, members] : strata) sizes[tag] = members.size();
  const auto quotas = stratum_quotas(sizes, n);

  std::vector<std::size_t> chosen;
  for (auto& [tag, members] : strata) {
    Rng rng = keyed_rng(seed, to_string(tag));
    const std::size_t k = quotas.at(tag);
    for (std::size_t i = 0; i < k; ++i)
      std::swap(members[i], members[i + uniform_index(rng, members.size() - i)]);
    chosen.insert(chosen.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(k));
  }
  std::sort(chosen.begin(), chosen.end());

  std::vector<AuditTask> tasks;
  tasks.reserve(chosen.size());
  const int width = std::max<int>(4, static_cast<int>(std::to_string(chosen.size()).size()));
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    const CorpusEntry& entry = corpus[chosen[i]];
    if (!entry.uas) invalid("entry '" + entry.id + "' has no UAS record to audit");
    std::ostringstream id;
    id << "task-" << std::setw(width) << std::setfill('0') << (i + 1);
    tasks.push_back({id.str(), entry.id, entry.audioRef, entry.domainTag, render_fields(*entry.uas), roster});
  }
  return tasks;
}

// ---------------------------------------------------------------------------

std::string_view to_string(JudgmentVerdict verdict) {
  switch (verdict) {
    case JudgmentVerdict::Correct: return "Correct";
    case JudgmentVerdict::Incorrect: return "Incorrect";
    case JudgmentVerdict::Unsure: return "Unsure";
  }
  return "Unsure";
}

std::optional<JudgmentVerdict> judgment_verdict_from_string(std::string_view text) {
  if (text == "Correct") return JudgmentVerdict::Correct;
  if (text == "Incorrect") return JudgmentVerdict::Incorrect;
  if (text == "Unsure") return JudgmentVerdict::Unsure;
  return std::nullopt;
}

std::string format_utc(std::int64_t seconds) {
  const std::time_t t = static_cast<std::time_t>(seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::int64_t parse_utc(std::string_view text) {
  std::tm tm{};
  char tail = 0;
  const std::string s(text);
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &tm.tm_year, &tm.tm_mon, &tm.tm_mday,
                  &tm.tm_hour, &tm.tm_min, &tm.tm_sec, &tail) != 7 ||
      tail != 'Z' || s.size() != 20)
    invalid("timestamp must look like 2026-01-31T12:00:00Z, got '" + s + "'");
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  return static_cast<std::int64_t>(timegm(&tm));
}

ordered_json judgment_to_json(const AuditJudgment& judgment) {
  ordered_json doc;
  doc["taskId"] = judgment.taskId;
  doc["annotatorId"] = judgment.annotatorId;
  doc["fieldPath"] = judgment.fieldPath;
  doc["verdict"] = std::string(to_string(judgment.verdict));
  doc["submittedAt"] = format_utc(judgment.submittedAt);
  return doc;
}

AuditJudgment judgment_from_json(const json& doc) {
  if (!doc.is_object()) invalid("judgment must be a JSON object");
  auto text = [&](const char* key) {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_string() || it->get_ref<const std::string&>().empty())
      invalid(std::string("judgment needs a non-empty string '") + key + "'");
    return it->get<std::string>();
  };
  AuditJudgment judgment;
  judgment.taskId = text("taskId");
  judgment.annotatorId = text("annotatorId");
  judgment.fieldPath = text("fieldPath");
  auto verdict = judgment_verdict_from_string(text("verdict"));
  if (!verdict) invalid("verdict must be Correct, Incorrect or Unsure");
  judgment.verdict = *verdict;
  if (auto it = doc.find("submittedAt"); it != doc.end() && !it->is_null()) {
    if (!it->is_string()) invalid("submittedAt must be a UTC timestamp string");
    judgment.submittedAt = parse_utc(it->get<std::string>());
  }
  return judgment;
}

std::string_view to_string(Consensus consensus) {
  switch (consensus) {
    case Consensus::Correct: return "Correct";
    case Consensus::NotCorrect: return "NotCorrect";
    case Consensus::Pending: return "Pending";
  }
  return "Pending";
}

Consensus consensus(std::span<const JudgmentVerdict> verdicts, int required, UnsurePolicy policy) {
  if (required < 1) invalid("required vote count must be positive");
  if (verdicts.size() < static_cast<std::size_t>(required)) return Consensus::Pending;
  const auto correct = std::count(verdicts.begin(), verdicts.end(), JudgmentVerdict::Correct);
  if (policy == UnsurePolicy::Abstain) {
    const auto incorrect = std::count(verdicts.begin(), verdicts.end(), JudgmentVerdict::Incorrect);
    return correct > incorrect ? Consensus::Correct : Consensus::NotCorrect;
  }
  return 2 * static_cast<std::size_t>(correct) > verdicts.size() ? Consensus::Correct
                                                                  : Consensus::NotCorrect;
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z) {
  if (n == 0) invalid("wilson_interval needs n > 0");
  if (successes > n) invalid("successes cannot exceed n");
  if (!(z > 0.0)) invalid("z must be positive");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  // The bounds are exactly 0 and 1 at the edges; the closed form only gets
  // within rounding of them.
  const double lower = successes == 0 ? 0.0 : std::clamp(center - half, 0.0, 1.0);
  const double upper = successes == n ? 1.0 : std::clamp(center + half, 0.0, 1.0);
  return {lower, upper};
}

// ---------------------------------------------------------------------------

ordered_json FieldAccuracy::to_json() const {
  ordered_json doc;
  doc["domain"] = domain;
  doc["field"] = displayName;
  doc["fieldPath"] = fieldPath;
  doc["taskCount"] = taskCount;
  doc["n"] = n;
  doc["successes"] = successes;
  doc["notCorrect"] = notCorrect;
  doc["pending"] = pending;
  doc["accuracy"] = accuracy ? ordered_json(*accuracy) : ordered_json(nullptr);
  doc["ciLower"] = ci ? ordered_json(ci->lower) : ordered_json(nullptr);
  doc["ciUpper"] = ci ? ordered_json(ci->upper) : ordered_json(nullptr);
  doc["complete"] = complete;
  return doc;
}

std::vector<FieldAccuracy> field_accuracy_report(const JudgmentStore& store,
                                                 std::span<const AuditTask> tasks,
                                                 const ReportOptions& options) {
  std::vector<FieldAccuracy> rows;
  for (const auto& info : kFieldInfo) {
    FieldAccuracy row;
    row.fieldPath = std::string(info.path);
    row.domain = std::string(info.domain);
    row.displayName = std::string(info.display);
    row.taskCount = tasks.size();
    for (const auto& task : tasks) {
      const auto votes = store.verdicts(task.taskId, info.path);
      switch (consensus(votes, options.requiredVotes, options.unsurePolicy)) {
        case Consensus::Correct: ++row.successes; break;
        case Consensus::NotCorrect: ++row.notCorrect; break;
        case Consensus::Pending: ++row.pending; break;
      }
    }
    row.n = row.successes + row.notCorrect;
    row.complete = row.pending == 0 && row.n > 0;
    if (row.n > 0) {
      row.accuracy = static_cast<double>(row.successes) / static_cast<double>(row.n);
      row.ci = wilson_interval(row.successes, row.n, options.z);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json report_to_json(std::span<const FieldAccuracy> rows) {
  ordered_json out = ordered_json::array();
  for (const auto& row : rows) out.push_back(row.to_json());
  return out;
}

std::string report_to_table(std::span<const FieldAccuracy> rows) {
  std::ostringstream out;
  auto cell = [&](const std::string& text, int width) { out << std::left << std::setw(width) << text; };
  cell("Domain", 24);
  cell("Field", 20);
  cell("Accuracy (%)", 14);
  cell("95% CI", 18);
  cell("n", 6);
  out << "Status\n";
  for (const auto& row : rows) {
    cell(row.domain, 24);
    cell(row.displayName, 20);
    std::ostringstream acc, ci;
    acc << std::fixed << std::setprecision(2);
    ci << std::fixed << std::setprecision(2);
    if (row.accuracy) {
      acc << *row.accuracy * 100.0;
      ci << "[" << row.ci->lower * 100.0 << ", " << row.ci->upper * 100.0 << "]";
    } else {
      acc.str("-");
      ci.str("-");
    }
    cell(acc.str(), 14);
    cell(ci.str(), 18);
    cell(std::to_string(row.n), 6);
    if (row.pending == 0 && row.n > 0) out << "complete";
    else out << row.pending << " pending";
    out << '\n';
  }
  return out.str();
}

}  // namespace uas::audit
