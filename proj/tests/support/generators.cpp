// tests/support/generators.cpp

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

#include "generators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iterator>
#include <string_view>

namespace uas::testgen {

namespace {

using Pool = std::vector<std::string_view>;

const Pool kWords = {"the",   "a",      "we",     "could", "maybe", "tomorrow", "river",  "green",
                     "café",  "naïve",  "Zürich", "niño",  "東京",  "Grüße",    "piñata", "okay",
                     "never", "listen", "seven",  "ship",  "quiet", "façade",   "über",   "déjà"};
const Pool kPunct = {"", "", "", ",", "?", "!", "."};

const Pool kAccents = {"General American", "Scottish", "Nigerian English", "Received Pronunciation",
                       "Indian English",   "Texan",    "Parisian French",  "Mandarin-accented English"};
const Pool kProsody = {"steady pace with falling intonation", "rapid and clipped", "slow with long pauses",
                       "rising questioning contour",          "emphatic stresses", "monotone delivery"};
const Pool kTimbre = {"warm and clear", "raspy", "breathy and soft", "bright", "nasal", "hoarse",
                      "smooth and rich", "thin"};
const Pool kEventLabels = {"Door slam",  "Dog bark",    "Car horn",  "Footsteps",   "Glass clink",
                           "Cough",      "Phone ring",  "Thunder",   "Keyboard",    "Bird chirp",
                           "Siren",      "Rain",        "Wind",      "Traffic",     "Crowd murmur",
                           "Hum",        "Music",       "Applause",  "Engine idle", "Waves",
                           "Typing",     "Clock tick",  "Laughter",  "Whistle",     "Bell"};
const Pool kCharacteristics = {"brief and sharp", "distant", "loud", "muffled", "steady",
                               "intermittent",    "soft",    "close", "echoing"};
const Pool kDescWords = {"a",      "busy",   "quiet", "room",    "street", "with",  "people",
                         "talking", "near", "the",   "window",  "outdoor", "scene", "indoor",
                         "calm",   "recording", "of",  "distant", "traffic", "and"};
const Pool kExotic = {"quote \" inside", "back\\slash", "tab\there", "new\nline", "emoji 🎧",
                      "ctrl \x01 char",  "slash /",    "braces {}", "ünïcödé",  "日本語"};

const std::vector<std::string> kBadAge = {"Teenager", "Young adult", "Toddler", "Middle-aged", "adult"};
const std::vector<std::string> kBadGender = {"Boy", "Woman", "Nonbinary", "male", "Unknown"};
const std::vector<std::string> kBadEmotion = {"Happy", "Calm", "Excited", "Angry", "Bored"};

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& pool) {
  return pool[uniform_index(rng, pool.size())];
}

std::string pick_str(Rng& rng, const Pool& pool) { return std::string(pool[uniform_index(rng, pool.size())]); }

bool coin(Rng& rng) { return uniform_index(rng, 2) == 1; }

std::string text_field(Rng& rng, const Pool& pool, bool exotic) {
  std::string s = pick_str(rng, pool);
  if (exotic && coin(rng)) s += " " + pick_str(rng, kExotic);
  return s;
}

std::vector<AcousticEvent> take_events(Rng& rng, std::vector<std::string_view>& labels, std::size_t count,
                                       bool exotic) {
  std::vector<AcousticEvent> out;
  for (std::size_t i = 0; i < count && !labels.empty(); ++i) {
    const std::size_t j = uniform_index(rng, labels.size());
    out.push_back({std::string(labels[j]), text_field(rng, kCharacteristics, exotic)});
    labels.erase(labels.begin() + static_cast<std::ptrdiff_t>(j));
  }
  return out;
}

std::size_t words_in(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    const bool space = std::isspace(c) != 0;
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

// Shortest clip length that keeps the record inside the default thresholds, plus slack.
double comfortable_duration(Rng& rng, const UasRecord& record) {
  const double by_events = static_cast<double>(record.nonLinguisticEvents.discreteEvents.size()) / 2.0;
  const double by_words = static_cast<double>(words_in(record.nonLinguisticEvents.description)) / 8.0;
  const double base = std::max({0.5, by_events, by_words});
  return std::round((base + 0.5 + static_cast<double>(uniform_index(rng, 200)) / 10.0) * 100.0) / 100.0;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

}  // namespace

std::string random_transcription(Rng& rng) {
  const std::size_t n = 1 + uniform_index(rng, 12);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += pick_str(rng, kWords);
    out += pick_str(rng, kPunct);
  }
  if (std::islower(static_cast<unsigned char>(out[0]))) out[0] = static_cast<char>(std::toupper(out[0]));
  return out;
}

UasRecord random_record(Rng& rng, const RecordShape& shape) {
  static const Ontology ontology;
  UasRecord r;
  if (shape.speech) {
    r.transcription = random_transcription(rng);
    if (shape.exotic && coin(rng)) *r.transcription += " " + pick_str(rng, kExotic);
    auto& p = r.paralinguistics;
    p.age = pick(rng, ontology.ageSet);
    p.gender = pick(rng, ontology.genderSet);
    p.emotion = pick(rng, ontology.emotionSet);
    auto free_text = [&](const Pool& pool) -> std::optional<std::string> {
      if (shape.sparseFreeText && uniform_index(rng, 3) == 0) return std::nullopt;
      return text_field(rng, pool, shape.exotic);
    };
    p.accent = free_text(kAccents);
    p.prosody = free_text(kProsody);
    p.timbre = free_text(kTimbre);
  }
  auto& scene = r.nonLinguisticEvents;
  const std::size_t desc_words = 3 + uniform_index(rng, 14);
  for (std::size_t i = 0; i < desc_words; ++i) {
    if (i) scene.description += ' ';
    scene.description += pick_str(rng, kDescWords);
  }
  if (shape.exotic && coin(rng)) scene.description += " " + pick_str(rng, kExotic);
  std::vector<std::string_view> labels(kEventLabels.begin(), kEventLabels.end());
  scene.discreteEvents = take_events(rng, labels, uniform_index(rng, 5), shape.exotic);
  scene.continuousEvents = take_events(rng, labels, uniform_index(rng, 4), shape.exotic);
  return r;
}

UasRecord full_speech_record(Rng& rng) {
  UasRecord r = random_record(rng, {.speech = true});
  std::vector<std::string_view> labels(kEventLabels.begin(), kEventLabels.end());
  auto& scene = r.nonLinguisticEvents;
  scene.discreteEvents = take_events(rng, labels, 1 + uniform_index(rng, 3), false);
  scene.continuousEvents = take_events(rng, labels, 1 + uniform_index(rng, 3), false);
  return r;
}

CorpusEntry random_valid_entry(Rng& rng, const std::string& id, bool speech) {
  CorpusEntry e;
  e.id = id;
  e.audioRef = "audio/" + id + ".wav";
  e.uas = random_record(rng, {.speech = speech});
  e.durationSeconds = comfortable_duration(rng, *e.uas);
  if (speech) {
    e.domainTag = DomainTag::Speech;
    e.groundTruthTranscription = *e.uas->transcription;
  } else {
    e.domainTag = coin(rng) ? DomainTag::Music : DomainTag::Environment;
    if (coin(rng)) e.groundTruthTranscription = "";
  }
  return e;
}

CorpusEntry random_valid_entry(Rng& rng, const std::string& id) {
  return random_valid_entry(rng, id, uniform_index(rng, 3) != 0);
}

CorpusEntry make_faulty_entry(Rng& rng, const std::string& id, ViolationCode code) {
  static const Ontology ontology;
  const bool speech_base = code == ViolationCode::OntologyViolation ||
                           code == ViolationCode::TranscriptionMismatch ||
                           code == ViolationCode::GenderTimbreContradiction || coin(rng);
  CorpusEntry e = random_valid_entry(rng, id, speech_base);
  UasRecord& r = *e.uas;
  auto& p = r.paralinguistics;
  auto& scene = r.nonLinguisticEvents;

  switch (code) {
    case ViolationCode::OntologyViolation:
      switch (uniform_index(rng, 3)) {
        case 0: p.age = pick(rng, kBadAge); break;
        case 1: p.gender = pick(rng, kBadGender); break;
        default: p.emotion = pick(rng, kBadEmotion); break;
      }
      break;

    case ViolationCode::TranscriptionMismatch: {
      std::string& gt = *e.groundTruthTranscription;
      const std::size_t pos = uniform_index(rng, gt.size() + 1);
      gt.insert(pos, 1, static_cast<char>('a' + uniform_index(rng, 26)));
      break;
    }

    case ViolationCode::NullRuleViolation:
      if (speech_base) {
        std::optional<std::string>* slot = paralinguistic_field(r, kParalinguisticFields[uniform_index(rng, 6)]);
        slot->reset();
      } else {
        const auto path = kParalinguisticFields[uniform_index(rng, 6)];
        std::optional<std::string>* slot = paralinguistic_field(r, path);
        if (const auto* set = ontology.closed_set(path)) *slot = pick(rng, *set);
        else *slot = "calm and even";
      }
      break;

    case ViolationCode::GenderTimbreContradiction: {
      std::vector<std::string> phrases;
      for (const auto& [gender, phrase] : ontology.contradictionLexicon)
        if (gender == *p.gender) phrases.push_back(phrase);
      const std::string phrase = pick(rng, phrases);
      if (coin(rng)) p.timbre = "soft, " + phrase + " quality";
      else p.prosody = *p.prosody + " with a " + phrase + " delivery";
      break;
    }

    case ViolationCode::DuplicateEventLabel: {
      std::vector<std::string> used;
      for (const auto& ev : scene.discreteEvents) used.push_back(lower(ev.label));
      for (const auto& ev : scene.continuousEvents) used.push_back(lower(ev.label));
      std::string label;
      for (auto candidate : kEventLabels) {
        if (std::find(used.begin(), used.end(), lower(std::string(candidate))) == used.end()) {
          label = std::string(candidate);
          break;
        }
      }
      const std::string twin = coin(rng) ? upper(label) : "  " + label + " ";
      scene.continuousEvents.push_back({label, "steady"});
      scene.continuousEvents.push_back({twin, "faint"});
      break;
    }

    case ViolationCode::DurationContentMismatch:
      switch (uniform_index(rng, 3)) {
        case 0:
          e.durationSeconds = 0.1;
          break;
        case 1: {
          e.durationSeconds = 1.0;
          std::vector<std::string_view> labels;
          for (auto l : kEventLabels) {
            const bool taken = std::any_of(scene.continuousEvents.begin(), scene.continuousEvents.end(),
                                           [&](const AcousticEvent& ev) { return ev.label == l; });
            if (!taken) labels.push_back(l);
          }
          scene.discreteEvents = take_events(rng, labels, 3 + uniform_index(rng, 3), false);
          break;
        }
        default: {
          e.durationSeconds = 1.0;
          scene.description.clear();
          const std::size_t words = 9 + uniform_index(rng, 20);
          for (std::size_t i = 0; i < words; ++i) scene.description += (i ? " " : "") + pick_str(rng, kDescWords);
          if (scene.discreteEvents.size() > 2) scene.discreteEvents.resize(2);
          break;
        }
      }
      break;

    case ViolationCode::EmptyField: {
      const std::size_t choice = uniform_index(rng, 3);
      if (choice == 0 || (choice == 2 && !speech_base)) {
        scene.description = coin(rng) ? "" : "   ";
      } else if (choice == 1) {
        scene.continuousEvents.push_back({"Hiss", coin(rng) ? "" : " \t"});
      } else {
        *paralinguistic_field(r, kParalinguisticFields[3 + uniform_index(rng, 3)]) = " ";
      }
      break;
    }
  }
  return e;
}

}  // namespace uas::testgen
