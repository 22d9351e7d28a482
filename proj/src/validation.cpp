// src/validation.cpp

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

#include "uas/validation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <memory>
#include <sstream>
#include <unordered_set>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>
#include <unicode/ustring.h>

#include "uas/error.hpp"

namespace uas {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(ViolationCode code) {
  switch (code) {
    case ViolationCode::OntologyViolation: return "OntologyViolation";
    case ViolationCode::TranscriptionMismatch: return "TranscriptionMismatch";
    case ViolationCode::NullRuleViolation: return "NullRuleViolation";
    case ViolationCode::GenderTimbreContradiction: return "GenderTimbreContradiction";
    case ViolationCode::DuplicateEventLabel: return "DuplicateEventLabel";
    case ViolationCode::DurationContentMismatch: return "DurationContentMismatch";
    case ViolationCode::EmptyField: return "EmptyField";
  }
  return "Unknown";
}

ViolationCode violation_code_from_string(std::string_view text) {
  for (auto code : kAllViolationCodes)
    if (to_string(code) == text) return code;
  throw Error(ErrorCode::SchemaShapeError, "unknown violation code '" + std::string(text) + "'");
}

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::Accept ? "Accept" : "Reject";
}

ordered_json report_to_json(const ValidationReport& report) {
  ordered_json doc;
  doc["recordId"] = report.recordId;
  doc["verdict"] = std::string(to_string(report.verdict));
  ordered_json list = ordered_json::array();
  for (const auto& v : report.violations) {
    ordered_json item;
    item["code"] = std::string(to_string(v.code));
    item["field"] = v.field;
    item["detail"] = v.detail;
    list.push_back(std::move(item));
  }
  doc["violations"] = std::move(list);
  return doc;
}

ValidationReport report_from_json(const json& doc) {
  try {
    ValidationReport report;
    report.recordId = doc.at("recordId").get<std::string>();
    const auto verdict = doc.at("verdict").get<std::string>();
    if (verdict != "Accept" && verdict != "Reject")
      throw Error(ErrorCode::SchemaShapeError, "unknown verdict '" + verdict + "'");
    report.verdict = verdict == "Accept" ? Verdict::Accept : Verdict::Reject;
    for (const auto& item : doc.at("violations")) {
      report.violations.push_back({violation_code_from_string(item.at("code").get<std::string>()),
                                   item.at("field").get<std::string>(),
                                   item.at("detail").get<std::string>()});
    }
    return report;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaShapeError, std::string("invalid validation report: ") + e.what());
  }
}

std::string serialize_report(const ValidationReport& report) {
  return report_to_json(report).dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

void AlignmentThresholds::check() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::ConfigError, std::string(name) + " must be a positive number");
  };
  positive(maxDiscreteEventsPerSecond, "maxDiscreteEventsPerSecond");
  positive(maxDescriptionWordsPerSecond, "maxDescriptionWordsPerSecond");
  positive(minDurationSeconds, "minDurationSeconds");
}

AlignmentThresholds AlignmentThresholds::from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::ConfigError, "thresholds must be an object");
  AlignmentThresholds t;
  try {
    t.maxDiscreteEventsPerSecond = doc.value("maxDiscreteEventsPerSecond", t.maxDiscreteEventsPerSecond);
    t.maxDescriptionWordsPerSecond = doc.value("maxDescriptionWordsPerSecond", t.maxDescriptionWordsPerSecond);
    t.minDurationSeconds = doc.value("minDurationSeconds", t.minDurationSeconds);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("invalid thresholds: ") + e.what());
  }
  t.check();
  return t;
}

ordered_json AlignmentThresholds::to_json() const {
  ordered_json doc;
  doc["maxDiscreteEventsPerSecond"] = maxDiscreteEventsPerSecond;
  doc["maxDescriptionWordsPerSecond"] = maxDescriptionWordsPerSecond;
  doc["minDurationSeconds"] = minDurationSeconds;
  return doc;
}

// ---------------------------------------------------------------------------

namespace {

bool is_valid_utf8(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  int32_t length = 0;
  u_strFromUTF8(nullptr, 0, &length, text.data(), static_cast<int32_t>(text.size()), &status);
  return status != U_INVALID_CHAR_FOUND && status != U_ILLEGAL_ARGUMENT_ERROR;
}

bool is_blank(std::string_view text) {
  return std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string lower_ascii(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// Case-insensitive search for a phrase that starts and ends on word
// boundaries, so "male voice" does not fire inside "female voice".
bool contains_phrase(const std::string& haystack_lower, const std::string& phrase_lower) {
  if (phrase_lower.empty()) return false;
  std::size_t pos = 0;
  while ((pos = haystack_lower.find(phrase_lower, pos)) != std::string::npos) {
    const std::size_t end = pos + phrase_lower.size();
    const bool left_ok = pos == 0 || !is_word_char(haystack_lower[pos - 1]) ||
                         !is_word_char(phrase_lower.front());
    const bool right_ok = end == haystack_lower.size() || !is_word_char(haystack_lower[end]) ||
                          !is_word_char(phrase_lower.back());
    if (left_ok && right_ok) return true;
    ++pos;
  }
  return false;
}

std::string trim(std::string_view text) {
  auto begin = std::find_if_not(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); });
  auto end = std::find_if_not(text.rbegin(), text.rend(), [](unsigned char c) { return std::isspace(c); }).base();
  return begin < end ? std::string(begin, end) : std::string();
}

std::size_t word_count(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::size_t count = 0;
  std::string word;
  while (in >> word) ++count;
  return count;
}

std::string format_number(double value) {
  std::ostringstream out;
  out << value;
  return out.str();
}

int check_stage(ViolationCode code) {
  switch (code) {
    case ViolationCode::OntologyViolation: return 1;
    case ViolationCode::TranscriptionMismatch: return 2;
    case ViolationCode::DurationContentMismatch: return 4;
    default: return 3;
  }
}

}  // namespace

std::string nfc_normalize(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorCode::InvalidArgument, "ICU NFC normalizer unavailable");
  icu::UnicodeString source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString normalized = nfc->normalize(source, status);
  if (U_FAILURE(status)) throw Error(ErrorCode::InvalidArgument, "NFC normalization failed");
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::vector<Violation> check_ontology(const UasRecord& record, const Ontology& ontology) {
  std::vector<Violation> out;
  for (std::string_view path : {"paralinguistics.age", "paralinguistics.gender", "paralinguistics.emotion"}) {
    const auto* value = paralinguistic_field(record, path);
    if (!*value || ontology.contains(path, **value)) continue;
    std::string allowed;
    for (const auto& label : *ontology.closed_set(path)) {
      if (!allowed.empty()) allowed += ", ";
      allowed += label;
    }
    out.push_back({ViolationCode::OntologyViolation, std::string(path),
                   "'" + **value + "' is not in the closed set {" + allowed + "}"});
  }
  return out;
}

std::vector<Violation> check_transcription_integrity(const UasRecord& record,
                                                     std::string_view groundTruth) {
  const std::string_view produced =
      record.transcription ? std::string_view(*record.transcription) : std::string_view();
  bool equal = false;
  if (record.transcription || groundTruth.empty()) {
    if (is_valid_utf8(produced) && is_valid_utf8(groundTruth))
      equal = nfc_normalize(produced) == nfc_normalize(groundTruth);
    else
      equal = produced == groundTruth;
  }
  if (equal) return {};
  std::string detail = record.transcription
                           ? "transcription differs from ground truth"
                           : "transcription is null but ground truth is non-empty";
  return {{ViolationCode::TranscriptionMismatch, "transcription", std::move(detail)}};
}

std::vector<Violation> check_logical_consistency(const UasRecord& record, const Ontology& ontology,
                                                 const ValidationOptions& options) {
  std::vector<Violation> out;
  const auto& p = record.paralinguistics;

  // Null rule, both directions.
  const bool speech = is_speech(record);
  for (std::string_view path : kParalinguisticFields) {
    const auto& value = *paralinguistic_field(record, path);
    if (!speech && value) {
      out.push_back({ViolationCode::NullRuleViolation, std::string(path),
                     "no speech in transcription but field is set"});
    } else if (speech && !value) {
      const bool required = options.strict || is_categorical_field(path);
      if (required)
        out.push_back({ViolationCode::NullRuleViolation, std::string(path),
                       "speech is present but field is null"});
    }
  }

  if (p.gender) {
    std::string voice = lower_ascii(p.timbre.value_or("") + " | " + p.prosody.value_or(""));
    for (const auto& [gender, phrase] : ontology.contradictionLexicon) {
      if (gender != *p.gender) continue;
      if (contains_phrase(voice, lower_ascii(phrase))) {
        out.push_back({ViolationCode::GenderTimbreContradiction, "paralinguistics.gender",
                       "gender '" + *p.gender + "' contradicts voice description ('" + phrase + "')"});
        break;
      }
    }
  }

  const auto& scene = record.nonLinguisticEvents;
  std::unordered_set<std::string> seen;
  auto scan_events = [&](const std::vector<AcousticEvent>& events, const char* list) {
    for (std::size_t i = 0; i < events.size(); ++i) {
      const std::string base =
          std::string("nonLinguisticEvents.") + list + "[" + std::to_string(i) + "]";
      const auto& event = events[i];
      if (is_blank(event.label))
        out.push_back({ViolationCode::EmptyField, base + ".label", "event label is empty"});
      else if (!seen.insert(lower_ascii(trim(event.label))).second)
        out.push_back({ViolationCode::DuplicateEventLabel, base + ".label",
                       "event label '" + event.label + "' is not unique"});
      if (is_blank(event.characteristic))
        out.push_back({ViolationCode::EmptyField, base + ".characteristic",
                       "event characteristic is empty"});
    }
  };
  scan_events(scene.discreteEvents, "discreteEvents");
  scan_events(scene.continuousEvents, "continuousEvents");

  if (is_blank(scene.description))
    out.push_back({ViolationCode::EmptyField, "nonLinguisticEvents.description", "description is empty"});
  if (record.transcription && is_blank(*record.transcription))
    out.push_back({ViolationCode::EmptyField, "transcription",
                   "transcription is blank; use null for no speech"});
  for (std::string_view path : kParalinguisticFields) {
    const auto& value = *paralinguistic_field(record, path);
    if (value && is_blank(*value))
      out.push_back({ViolationCode::EmptyField, std::string(path), "field is an empty string"});
  }
  return out;
}

std::vector<Violation> check_duration_alignment(const UasRecord& record, double durationSeconds,
                                                const AlignmentThresholds& thresholds) {
  std::vector<Violation> out;
  if (durationSeconds < thresholds.minDurationSeconds) {
    out.push_back({ViolationCode::DurationContentMismatch, "durationSeconds",
                   "clip of " + format_number(durationSeconds) + " s is shorter than " +
                       format_number(thresholds.minDurationSeconds) + " s"});
  }
  const auto& scene = record.nonLinguisticEvents;
  const double max_events = thresholds.maxDiscreteEventsPerSecond * durationSeconds;
  if (static_cast<double>(scene.discreteEvents.size()) > max_events) {
    out.push_back({ViolationCode::DurationContentMismatch, "nonLinguisticEvents.discreteEvents",
                   std::to_string(scene.discreteEvents.size()) + " discrete events exceed " +
                       format_number(max_events) + " allowed for " + format_number(durationSeconds) + " s"});
  }
  const std::size_t words = word_count(scene.description);
  const double max_words = thresholds.maxDescriptionWordsPerSecond * durationSeconds;
  if (static_cast<double>(words) > max_words) {
    out.push_back({ViolationCode::DurationContentMismatch, "nonLinguisticEvents.description",
                   std::to_string(words) + " description words exceed " + format_number(max_words) +
                       " allowed for " + format_number(durationSeconds) + " s"});
  }
  return out;
}

ValidationReport validate(const CorpusEntry& entry, const Ontology& ontology,
                          const AlignmentThresholds& thresholds, const ValidationOptions& options) {
  if (!entry.uas) throw Error(ErrorCode::MissingUas, "entry '" + entry.id + "' has no UAS record");
  const UasRecord& record = *entry.uas;

  std::vector<Violation> all = check_ontology(record, ontology);
  if (entry.groundTruthTranscription) {
    auto v = check_transcription_integrity(record, *entry.groundTruthTranscription);
    all.insert(all.end(), v.begin(), v.end());
  } else if (entry.domainTag == DomainTag::Speech) {
    throw Error(ErrorCode::MissingGroundTruth,
                "speech entry '" + entry.id + "' has no ground-truth transcription");
  }
  auto logical = check_logical_consistency(record, ontology, options);
  all.insert(all.end(), logical.begin(), logical.end());
  auto duration = check_duration_alignment(record, entry.durationSeconds, thresholds);
  all.insert(all.end(), duration.begin(), duration.end());

  std::stable_sort(all.begin(), all.end(), [](const Violation& a, const Violation& b) {
    const int sa = check_stage(a.code), sb = check_stage(b.code);
    if (sa != sb) return sa < sb;
    return a.field < b.field;
  });

  ValidationReport report;
  report.recordId = entry.id;
  report.violations = std::move(all);
  report.verdict = report.violations.empty() ? Verdict::Accept : Verdict::Reject;
  return report;
}

ValidationReport validate_entry(const CorpusEntry& entry, const Ontology& ontology,
                                const AlignmentThresholds& thresholds,
                                const ValidationOptions& options) {
  try {
    return validate(entry, ontology, thresholds, options);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::MissingGroundTruth) throw;
    ValidationReport report;
    report.recordId = entry.id;
    report.verdict = Verdict::Reject;
    report.violations.push_back({ViolationCode::TranscriptionMismatch, "transcription",
                                 "speech entry has no ground-truth transcription"});
    return report;
  }
}

}  // namespace uas
