// include/uas/schema.hpp

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

#include <array>
#include <compare>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace uas {

struct AcousticEvent {
  std::string label;
  std::string characteristic;

  friend bool operator==(const AcousticEvent&, const AcousticEvent&) = default;
};

// Categorical values are kept as raw strings so that out-of-vocabulary
// labels survive parsing and can be reported by the ontology check.
struct Paralinguistics {
  std::optional<std::string> age;
  std::optional<std::string> gender;
  std::optional<std::string> emotion;
  std::optional<std::string> accent;
  std::optional<std::string> prosody;
  std::optional<std::string> timbre;

  bool all_absent() const;
  bool all_present() const;

  friend bool operator==(const Paralinguistics&, const Paralinguistics&) = default;
};

struct NonLinguisticEvents {
  std::string description;
  std::vector<AcousticEvent> discreteEvents;
  std::vector<AcousticEvent> continuousEvents;

  friend bool operator==(const NonLinguisticEvents&, const NonLinguisticEvents&) = default;
};

struct UasRecord {
  std::optional<std::string> transcription;
  Paralinguistics paralinguistics;
  NonLinguisticEvents nonLinguisticEvents;

  friend bool operator==(const UasRecord&, const UasRecord&) = default;
};

/// Dotted paths of the six paralinguistic leaves, in document order.
inline constexpr std::array<std::string_view, 6> kParalinguisticFields = {
    "paralinguistics.age",     "paralinguistics.gender",  "paralinguistics.emotion",
    "paralinguistics.accent",  "paralinguistics.prosody", "paralinguistics.timbre",
};

/// The nine auditable leaf fields (paralinguistics plus scene), in report order.
inline constexpr std::array<std::string_view, 9> kLeafFields = {
    "paralinguistics.age",
    "paralinguistics.gender",
    "paralinguistics.emotion",
    "paralinguistics.accent",
    "paralinguistics.prosody",
    "paralinguistics.timbre",
    "nonLinguisticEvents.description",
    "nonLinguisticEvents.discreteEvents",
    "nonLinguisticEvents.continuousEvents",
};

/// Returns the paralinguistic slot addressed by a dotted path, or nullptr.
const std::optional<std::string>* paralinguistic_field(const UasRecord& record,
                                                       std::string_view path);
std::optional<std::string>* paralinguistic_field(UasRecord& record, std::string_view path);

bool is_categorical_field(std::string_view path);

enum class KeyPolicy { Reject, Warn };

struct ParseOptions {
  KeyPolicy unknownKeys = KeyPolicy::Reject;
};

/// Parses a single UAS JSON object. Enforces type shape only; semantic
/// rules belong to the validator. Explicit nulls and missing optional keys
/// both map to an absent value.
UasRecord parse_uas(std::string_view text, const ParseOptions& options = {},
                    std::vector<std::string>* warnings = nullptr);
UasRecord uas_from_json(const nlohmann::json& doc, const ParseOptions& options = {},
                        std::vector<std::string>* warnings = nullptr);

/// Compact document with fixed key order and explicit nulls.
std::string serialize_canonical(const UasRecord& record);
nlohmann::ordered_json uas_to_json(const UasRecord& record);

/// True iff a transcription is present and not blank.
bool is_speech(const UasRecord& record);

// ---------------------------------------------------------------------------
// Ontology

struct Ontology {
  std::vector<std::string> emotionSet{"Anger",     "Disgust", "Sadness", "Happiness",
                                      "Neutral",   "Surprise", "Fear"};
  std::vector<std::string> ageSet{"Child", "Adult", "Elderly"};
  std::vector<std::string> genderSet{"Male", "Female"};
  // (gender label, forbidden substring) pairs; substrings match case-insensitively
  // against timbre and prosody text.
  std::vector<std::pair<std::string, std::string>> contradictionLexicon{
      {"Male", "feminine"},       {"Male", "female voice"},   {"Male", "high-pitched feminine"},
      {"Male", "girlish"},        {"Female", "masculine"},    {"Female", "male voice"},
      {"Female", "deep masculine"}, {"Female", "baritone"},
  };

  /// Closed set for a categorical dotted path; nullptr for free-text paths.
  const std::vector<std::string>* closed_set(std::string_view path) const;
  bool contains(std::string_view path, std::string_view value) const;

  /// Throws ConfigError on empty sets or duplicate labels.
  void check() const;

  static Ontology from_json(const nlohmann::json& doc);
  nlohmann::ordered_json to_json() const;
};

// ---------------------------------------------------------------------------
// Corpus manifest

enum class DomainTag { Speech, Music, Environment };

std::string_view to_string(DomainTag tag);
DomainTag domain_tag_from_string(std::string_view text);

struct CorpusEntry {
  std::string id;
  std::string audioRef;
  double durationSeconds = 0.0;
  std::optional<std::string> groundTruthTranscription;
  DomainTag domainTag = DomainTag::Speech;
  std::optional<UasRecord> uas;

  friend bool operator==(const CorpusEntry&, const CorpusEntry&) = default;
};

CorpusEntry corpus_entry_from_json(const nlohmann::json& doc,
                                   const ParseOptions& options = {});
nlohmann::ordered_json corpus_entry_to_json(const CorpusEntry& entry);
/// One JSON-Lines line, without the trailing newline.
std::string serialize_entry(const CorpusEntry& entry);

/// Reads a JSON-Lines manifest. Blank lines are skipped. Errors carry the
/// 1-based line number; duplicate ids are rejected.
std::vector<CorpusEntry> read_manifest(std::istream& in, const ParseOptions& options = {});
std::vector<CorpusEntry> read_manifest_file(const std::string& path,
                                            const ParseOptions& options = {});

}  // namespace uas
