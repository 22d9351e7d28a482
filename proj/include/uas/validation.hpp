// include/uas/validation.hpp

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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "uas/schema.hpp"

namespace uas {

enum class ViolationCode {
  OntologyViolation,
  TranscriptionMismatch,
  NullRuleViolation,
  GenderTimbreContradiction,
  DuplicateEventLabel,
  DurationContentMismatch,
  EmptyField,
};

inline constexpr std::array<ViolationCode, 7> kAllViolationCodes = {
    ViolationCode::OntologyViolation,        ViolationCode::TranscriptionMismatch,
    ViolationCode::NullRuleViolation,        ViolationCode::GenderTimbreContradiction,
    ViolationCode::DuplicateEventLabel,      ViolationCode::DurationContentMismatch,
    ViolationCode::EmptyField,
};

std::string_view to_string(ViolationCode code);
ViolationCode violation_code_from_string(std::string_view text);

struct Violation {
  ViolationCode code;
  std::string field;
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

enum class Verdict { Accept, Reject };

std::string_view to_string(Verdict verdict);

struct ValidationReport {
  std::string recordId;
  Verdict verdict = Verdict::Accept;
  std::vector<Violation> violations;

  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

nlohmann::ordered_json report_to_json(const ValidationReport& report);
ValidationReport report_from_json(const nlohmann::json& doc);
/// One rejection-log line, without the trailing newline.
std::string serialize_report(const ValidationReport& report);

struct AlignmentThresholds {
  double maxDiscreteEventsPerSecond = 2.0;
  double maxDescriptionWordsPerSecond = 8.0;
  double minDurationSeconds = 0.2;

  void check() const;
  static AlignmentThresholds from_json(const nlohmann::json& doc);
  nlohmann::ordered_json to_json() const;
};

struct ValidationOptions {
  // Strict: a speech record must carry all six paralinguistic subfields.
  // Lenient: accent, prosody and timbre may be absent.
  bool strict = true;
};

// Stage 1: closed-vocabulary check on age, gender and emotion.
std::vector<Violation> check_ontology(const UasRecord& record, const Ontology& ontology);

// Stage 2: exact match after NFC normalization.
std::vector<Violation> check_transcription_integrity(const UasRecord& record,
                                                     std::string_view groundTruth);

// Stage 3: null rule, gender/voice contradictions, duplicate labels, empty strings.
std::vector<Violation> check_logical_consistency(const UasRecord& record, const Ontology& ontology,
                                                 const ValidationOptions& options = {});

// Stage 4: content volume relative to clip length.
std::vector<Violation> check_duration_alignment(const UasRecord& record, double durationSeconds,
                                                const AlignmentThresholds& thresholds);

/// Runs all four checks against an entry. Throws MissingUas when the entry
/// has no record, and MissingGroundTruth for a speech-tagged entry without a
/// reference transcription.
ValidationReport validate(const CorpusEntry& entry, const Ontology& ontology,
                          const AlignmentThresholds& thresholds,
                          const ValidationOptions& options = {});

/// validate(), except that a speech entry lacking a reference transcription
/// is rejected with TranscriptionMismatch instead of throwing.
ValidationReport validate_entry(const CorpusEntry& entry, const Ontology& ontology,
                                const AlignmentThresholds& thresholds,
                                const ValidationOptions& options = {});

/// Unicode NFC normalization of UTF-8 text.
std::string nfc_normalize(std::string_view text);

}  // namespace uas
