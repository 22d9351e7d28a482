// src/schema.cpp

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

#include "uas/schema.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "uas/error.hpp"

namespace uas {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::SchemaShapeError: return "SchemaShapeError";
    case ErrorCode::ManifestReadError: return "ManifestReadError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::MissingUas: return "MissingUas";
    case ErrorCode::MissingGroundTruth: return "MissingGroundTruth";
    case ErrorCode::EmptyAudioRef: return "EmptyAudioRef";
    case ErrorCode::EmptyCaption: return "EmptyCaption";
    case ErrorCode::NoJsonFound: return "NoJsonFound";
    case ErrorCode::FieldAbsent: return "FieldAbsent";
    case ErrorCode::InsufficientDistractors: return "InsufficientDistractors";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::CorpusTooSmall: return "CorpusTooSmall";
    case ErrorCode::StoreError: return "StoreError";
  }
  return "Unknown";
}

bool Paralinguistics::all_absent() const {
  return !age && !gender && !emotion && !accent && !prosody && !timbre;
}

bool Paralinguistics::all_present() const {
  return age && gender && emotion && accent && prosody && timbre;
}

namespace {

template <typename Record, typename Slot>
Slot* find_paralinguistic(Record& record, std::string_view path) {
  auto& p = record.paralinguistics;
  if (path == "paralinguistics.age") return &p.age;
  if (path == "paralinguistics.gender") return &p.gender;
  if (path == "paralinguistics.emotion") return &p.emotion;
  if (path == "paralinguistics.accent") return &p.accent;
  if (path == "paralinguistics.prosody") return &p.prosody;
  if (path == "paralinguistics.timbre") return &p.timbre;
  return nullptr;
}

[[noreturn]] void shape_error(const std::string& message) {
  throw Error(ErrorCode::SchemaShapeError, message);
}

void check_keys(const json& object, std::initializer_list<std::string_view> allowed,
                const std::string& where, const ParseOptions& options,
                std::vector<std::string>* warnings) {
  for (const auto& [key, value] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) continue;
    std::string message = "unknown key '" + where + key + "'";
    if (options.unknownKeys == KeyPolicy::Reject) shape_error(message);
    if (warnings) warnings->push_back(std::move(message));
  }
}

const json& require(const json& object, const char* key, const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) shape_error("missing required key '" + where + key + "'");
  return *it;
}

std::optional<std::string> optional_string(const json& object, const char* key,
                                           const std::string& where) {
  auto it = object.find(key);
  if (it == object.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) shape_error("'" + where + key + "' must be a string or null");
  return it->get<std::string>();
}

std::string required_string(const json& object, const char* key, const std::string& where) {
  const json& value = require(object, key, where);
  if (!value.is_string()) shape_error("'" + where + key + "' must be a string");
  return value.get<std::string>();
}

std::vector<AcousticEvent> parse_events(const json& object, const char* key,
                                        const ParseOptions& options,
                                        std::vector<std::string>* warnings) {
  const std::string where = std::string("nonLinguisticEvents.") + key;
  const json& list = require(object, key, "nonLinguisticEvents.");
  if (!list.is_array()) shape_error("'" + where + "' must be an array");
  std::vector<AcousticEvent> events;
  events.reserve(list.size());
  for (std::size_t i = 0; i < list.size(); ++i) {
    const json& item = list[i];
    const std::string prefix = where + "[" + std::to_string(i) + "].";
    if (!item.is_object()) shape_error("'" + where + "[" + std::to_string(i) + "]' must be an object");
    check_keys(item, {"label", "characteristic"}, prefix, options, warnings);
    events.push_back({required_string(item, "label", prefix),
                      required_string(item, "characteristic", prefix)});
  }
  return events;
}

ordered_json events_to_json(const std::vector<AcousticEvent>& events) {
  ordered_json list = ordered_json::array();
  for (const auto& e : events) {
    ordered_json item;
    item["label"] = e.label;
    item["characteristic"] = e.characteristic;
    list.push_back(std::move(item));
  }
  return list;
}

ordered_json optional_to_json(const std::optional<std::string>& value) {
  return value ? ordered_json(*value) : ordered_json(nullptr);
}

std::string dump_compact(const ordered_json& doc) {
  return doc.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

}  // namespace

const std::optional<std::string>* paralinguistic_field(const UasRecord& record,
                                                       std::string_view path) {
  return find_paralinguistic<const UasRecord, const std::optional<std::string>>(record, path);
}

std::optional<std::string>* paralinguistic_field(UasRecord& record, std::string_view path) {
  return find_paralinguistic<UasRecord, std::optional<std::string>>(record, path);
}

bool is_categorical_field(std::string_view path) {
  return path == "paralinguistics.age" || path == "paralinguistics.gender" ||
         path == "paralinguistics.emotion";
}

UasRecord uas_from_json(const json& doc, const ParseOptions& options,
                        std::vector<std::string>* warnings) {
  if (!doc.is_object()) shape_error("UAS document must be a JSON object");
  check_keys(doc, {"transcription", "paralinguistics", "nonLinguisticEvents"}, "", options,
             warnings);

  UasRecord record;
  record.transcription = optional_string(doc, "transcription", "");

  const json& para = require(doc, "paralinguistics", "");
  if (para.is_object()) {
    const std::string where = "paralinguistics.";
    check_keys(para, {"age", "gender", "emotion", "accent", "prosody", "timbre"}, where, options,
               warnings);
    auto& p = record.paralinguistics;
    p.age = optional_string(para, "age", where);
    p.gender = optional_string(para, "gender", where);
    p.emotion = optional_string(para, "emotion", where);
    p.accent = optional_string(para, "accent", where);
    p.prosody = optional_string(para, "prosody", where);
    p.timbre = optional_string(para, "timbre", where);
  } else if (!para.is_null()) {
    shape_error("'paralinguistics' must be an object or null");
  }

  const json& events = require(doc, "nonLinguisticEvents", "");
  if (!events.is_object()) shape_error("'nonLinguisticEvents' must be an object");
  check_keys(events, {"description", "discreteEvents", "continuousEvents"},
             "nonLinguisticEvents.", options, warnings);
  auto& scene = record.nonLinguisticEvents;
  scene.description = required_string(events, "description", "nonLinguisticEvents.");
  scene.discreteEvents = parse_events(events, "discreteEvents", options, warnings);
  scene.continuousEvents = parse_events(events, "continuousEvents", options, warnings);
  return record;
}

UasRecord parse_uas(std::string_view text, const ParseOptions& options,
                    std::vector<std::string>* warnings) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedDocument, std::string("not a JSON document: ") + e.what());
  }
  return uas_from_json(doc, options, warnings);
}

ordered_json uas_to_json(const UasRecord& record) {
  const auto& p = record.paralinguistics;
  ordered_json para;
  para["age"] = optional_to_json(p.age);
  para["gender"] = optional_to_json(p.gender);
  para["emotion"] = optional_to_json(p.emotion);
  para["accent"] = optional_to_json(p.accent);
  para["prosody"] = optional_to_json(p.prosody);
  para["timbre"] = optional_to_json(p.timbre);

  ordered_json scene;
  scene["description"] = record.nonLinguisticEvents.description;
  scene["discreteEvents"] = events_to_json(record.nonLinguisticEvents.discreteEvents);
  scene["continuousEvents"] = events_to_json(record.nonLinguisticEvents.continuousEvents);

  ordered_json doc;
  doc["transcription"] = optional_to_json(record.transcription);
  doc["paralinguistics"] = std::move(para);
  doc["nonLinguisticEvents"] = std::move(scene);
  return doc;
}

std::string serialize_canonical(const UasRecord& record) {
  return dump_compact(uas_to_json(record));
}

bool is_speech(const UasRecord& record) {
  if (!record.transcription) return false;
  return std::any_of(record.transcription->begin(), record.transcription->end(),
                     [](unsigned char c) { return !std::isspace(c); });
}

// ---------------------------------------------------------------------------

const std::vector<std::string>* Ontology::closed_set(std::string_view path) const {
  if (path == "paralinguistics.age") return &ageSet;
  if (path == "paralinguistics.gender") return &genderSet;
  if (path == "paralinguistics.emotion") return &emotionSet;
  return nullptr;
}

bool Ontology::contains(std::string_view path, std::string_view value) const {
  const auto* set = closed_set(path);
  return set && std::find(set->begin(), set->end(), value) != set->end();
}

void Ontology::check() const {
  auto check_set = [](const std::vector<std::string>& set, const char* name) {
    if (set.empty()) throw Error(ErrorCode::ConfigError, std::string(name) + " is empty");
    std::set<std::string_view> seen;
    for (const auto& label : set) {
      if (label.empty()) throw Error(ErrorCode::ConfigError, std::string(name) + " has an empty label");
      if (!seen.insert(label).second)
        throw Error(ErrorCode::ConfigError,
                    std::string(name) + " has duplicate label '" + label + "'");
    }
  };
  check_set(emotionSet, "emotionSet");
  check_set(ageSet, "ageSet");
  check_set(genderSet, "genderSet");
  for (const auto& [gender, phrase] : contradictionLexicon) {
    if (phrase.empty())
      throw Error(ErrorCode::ConfigError, "contradictionLexicon has an empty phrase for " + gender);
  }
}

Ontology Ontology::from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::ConfigError, "ontology must be an object");
  Ontology ontology;
  try {
    if (doc.contains("emotionSet")) ontology.emotionSet = doc.at("emotionSet").get<std::vector<std::string>>();
    if (doc.contains("ageSet")) ontology.ageSet = doc.at("ageSet").get<std::vector<std::string>>();
    if (doc.contains("genderSet")) ontology.genderSet = doc.at("genderSet").get<std::vector<std::string>>();
    if (doc.contains("contradictionLexicon")) {
      ontology.contradictionLexicon.clear();
      for (const auto& item : doc.at("contradictionLexicon")) {
        ontology.contradictionLexicon.emplace_back(item.at("gender").get<std::string>(),
                                                   item.at("phrase").get<std::string>());
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("invalid ontology: ") + e.what());
  }
  ontology.check();
  return ontology;
}

ordered_json Ontology::to_json() const {
  ordered_json doc;
  doc["emotionSet"] = emotionSet;
  doc["ageSet"] = ageSet;
  doc["genderSet"] = genderSet;
  ordered_json lexicon = ordered_json::array();
  for (const auto& [gender, phrase] : contradictionLexicon)
    lexicon.push_back({{"gender", gender}, {"phrase", phrase}});
  doc["contradictionLexicon"] = std::move(lexicon);
  return doc;
}

// ---------------------------------------------------------------------------

std::string_view to_string(DomainTag tag) {
  switch (tag) {
    case DomainTag::Speech: return "speech";
    case DomainTag::Music: return "music";
    case DomainTag::Environment: return "environment";
  }
  return "speech";
}

DomainTag domain_tag_from_string(std::string_view text) {
  if (text == "speech") return DomainTag::Speech;
  if (text == "music") return DomainTag::Music;
  if (text == "environment") return DomainTag::Environment;
  shape_error("domainTag must be one of speech, music, environment (got '" + std::string(text) + "')");
}

CorpusEntry corpus_entry_from_json(const json& doc, const ParseOptions& options) {
  if (!doc.is_object()) shape_error("corpus entry must be a JSON object");
  check_keys(doc, {"id", "audioRef", "durationSeconds", "groundTruthTranscription", "domainTag", "uas"},
             "", options, nullptr);
  CorpusEntry entry;
  entry.id = required_string(doc, "id", "");
  if (entry.id.empty()) shape_error("'id' must be non-empty");
  entry.audioRef = required_string(doc, "audioRef", "");
  const json& duration = require(doc, "durationSeconds", "");
  if (!duration.is_number()) shape_error("'durationSeconds' must be a number");
  entry.durationSeconds = duration.get<double>();
  if (!(entry.durationSeconds >= 0.0)) shape_error("'durationSeconds' must be >= 0");
  entry.groundTruthTranscription = optional_string(doc, "groundTruthTranscription", "");
  entry.domainTag = domain_tag_from_string(required_string(doc, "domainTag", ""));
  if (auto it = doc.find("uas"); it != doc.end() && !it->is_null())
    entry.uas = uas_from_json(*it, options);
  return entry;
}

ordered_json corpus_entry_to_json(const CorpusEntry& entry) {
  ordered_json doc;
  doc["id"] = entry.id;
  doc["audioRef"] = entry.audioRef;
  doc["durationSeconds"] = entry.durationSeconds;
  doc["groundTruthTranscription"] = optional_to_json(entry.groundTruthTranscription);
  doc["domainTag"] = std::string(to_string(entry.domainTag));
  doc["uas"] = entry.uas ? uas_to_json(*entry.uas) : ordered_json(nullptr);
  return doc;
}

std::string serialize_entry(const CorpusEntry& entry) {
  return dump_compact(corpus_entry_to_json(entry));
}

std::vector<CorpusEntry> read_manifest(std::istream& in, const ParseOptions& options) {
  std::vector<CorpusEntry> entries;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }))
      continue;
    auto fail = [&](const std::string& why) -> void {
      throw Error(ErrorCode::ManifestReadError, "line " + std::to_string(line_no) + ": " + why);
    };
    try {
      json doc = json::parse(line);
      CorpusEntry entry = corpus_entry_from_json(doc, options);
      if (!ids.insert(entry.id).second) fail("duplicate id '" + entry.id + "'");
      entries.push_back(std::move(entry));
    } catch (const json::parse_error& e) {
      fail(std::string("malformed JSON: ") + e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ManifestReadError) throw;
      fail(e.what());
    }
  }
  if (in.bad()) throw Error(ErrorCode::ManifestReadError, "read failure");
  return entries;
}

std::vector<CorpusEntry> read_manifest_file(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ManifestReadError, "cannot open manifest '" + path + "'");
  try {
    return read_manifest(in, options);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

}  // namespace uas
