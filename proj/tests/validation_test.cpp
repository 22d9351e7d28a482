// tests/validation_test.cpp

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

#include <set>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "uas/error.hpp"
#include "uas/validation.hpp"

namespace uas {
namespace {

UasRecord speech_record() {
  UasRecord r;
  r.transcription = "Hello there.";
  r.paralinguistics = {"Adult", "Male", "Neutral", "Irish", "calm and even", "deep and warm"};
  r.nonLinguisticEvents.description = "A man greets someone indoors.";
  r.nonLinguisticEvents.discreteEvents = {{"Door", "closes softly"}};
  r.nonLinguisticEvents.continuousEvents = {{"Hum", "fridge in the background"}};
  return r;
}

CorpusEntry speech_entry(UasRecord r = speech_record()) {
  CorpusEntry e;
  e.id = "s1";
  e.audioRef = "s1.wav";
  e.durationSeconds = 4.0;
  e.groundTruthTranscription = r.transcription;
  e.uas = std::move(r);
  return e;
}

std::set<ViolationCode> codes(const std::vector<Violation>& vs) {
  std::set<ViolationCode> out;
  for (const auto& v : vs) out.insert(v.code);
  return out;
}

const Ontology kOntology;
const AlignmentThresholds kThresholds;

TEST(ViolationCode, StringRoundTrip) {
  for (auto c : kAllViolationCodes) EXPECT_EQ(violation_code_from_string(to_string(c)), c);
  EXPECT_THROW(violation_code_from_string("Nope"), Error);
}

TEST(Ontology, FlagsEachOutOfSetCategoricalField) {
  UasRecord r = speech_record();
  r.paralinguistics.age = "Teenager";
  r.paralinguistics.emotion = "Happy";
  const auto v = check_ontology(r, kOntology);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].field, "paralinguistics.age");
  EXPECT_EQ(v[1].field, "paralinguistics.emotion");
  EXPECT_NE(v[1].detail.find("Happy"), std::string::npos);
}

TEST(Ontology, MatchingIsCaseSensitive) {
  UasRecord r = speech_record();
  r.paralinguistics.gender = "male";
  EXPECT_EQ(check_ontology(r, kOntology).size(), 1u);
}

TEST(Ontology, FreeTextFieldsAreNotChecked) {
  UasRecord r = speech_record();
  r.paralinguistics.accent = "Anything goes";
  EXPECT_TRUE(check_ontology(r, kOntology).empty());
}

TEST(Transcription, NfcEquivalentFormsMatch) {
  UasRecord r = speech_record();
  r.transcription = "cafe\xCC\x81";  // e + combining acute
  EXPECT_TRUE(check_transcription_integrity(r, "caf\xC3\xA9").empty());
}

TEST(Transcription, CaseWhitespaceAndPunctuationMatter) {
  UasRecord r = speech_record();
  for (const char* gt : {"hello there.", "Hello there. ", "Hello there", "Hello  there."})
    EXPECT_EQ(codes(check_transcription_integrity(r, gt)), std::set{ViolationCode::TranscriptionMismatch}) << gt;
}

TEST(Transcription, NullMatchesOnlyEmptyGroundTruth) {
  UasRecord r;
  EXPECT_TRUE(check_transcription_integrity(r, "").empty());
  const auto v = check_transcription_integrity(r, "words");
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].field, "transcription");
}

TEST(Transcription, InvalidUtf8ComparedByteWise) {
  UasRecord r;
  r.transcription = std::string("ab\xFF");
  EXPECT_TRUE(check_transcription_integrity(r, std::string("ab\xFF")).empty());
  EXPECT_FALSE(check_transcription_integrity(r, std::string("ab\xFE")).empty());
}

TEST(NullRule, StrictRequiresAllSixForSpeech) {
  UasRecord r = speech_record();
  r.paralinguistics.timbre.reset();
  const auto v = check_logical_consistency(r, kOntology);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].code, ViolationCode::NullRuleViolation);
  EXPECT_EQ(v[0].field, "paralinguistics.timbre");
  EXPECT_TRUE(check_logical_consistency(r, kOntology, {.strict = false}).empty());
}

TEST(NullRule, LenientStillRequiresCategoricalFields) {
  UasRecord r = speech_record();
  r.paralinguistics.gender.reset();
  EXPECT_EQ(codes(check_logical_consistency(r, kOntology, {.strict = false})),
            std::set{ViolationCode::NullRuleViolation});
}

TEST(NullRule, NoSpeechForbidsParalinguistics) {
  UasRecord r = speech_record();
  r.transcription.reset();
  const auto v = check_logical_consistency(r, kOntology);
  EXPECT_EQ(v.size(), 6u);
  for (const auto& x : v) EXPECT_EQ(x.code, ViolationCode::NullRuleViolation);
}

TEST(Contradiction, LexiconPhrasesFireForTheirGender) {
  UasRecord r = speech_record();
  r.paralinguistics.timbre = "Deep and BARITONE";
  r.paralinguistics.gender = "Female";
  EXPECT_EQ(codes(check_logical_consistency(r, kOntology)), std::set{ViolationCode::GenderTimbreContradiction});
  r.paralinguistics.gender = "Male";
  EXPECT_TRUE(check_logical_consistency(r, kOntology).empty());
}

TEST(Contradiction, ProsodyIsScannedToo) {
  UasRecord r = speech_record();
  r.paralinguistics.prosody = "girlish lilt";
  EXPECT_EQ(codes(check_logical_consistency(r, kOntology)), std::set{ViolationCode::GenderTimbreContradiction});
}

TEST(Contradiction, PhrasesRespectWordBoundaries) {
  UasRecord r = speech_record();
  r.paralinguistics.gender = "Female";
  r.paralinguistics.timbre = "clear female voice";
  EXPECT_TRUE(check_logical_consistency(r, kOntology).empty());
}

TEST(Contradiction, ReportedOncePerRecord) {
  UasRecord r = speech_record();
  r.paralinguistics.timbre = "feminine, girlish";
  r.paralinguistics.prosody = "female voice";
  EXPECT_EQ(check_logical_consistency(r, kOntology).size(), 1u);
}

TEST(DuplicateLabels, CaseAndWhitespaceInsensitiveAcrossLists) {
  UasRecord r = speech_record();
  r.nonLinguisticEvents.continuousEvents.push_back({" door ", "again"});
  const auto v = check_logical_consistency(r, kOntology);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].code, ViolationCode::DuplicateEventLabel);
  EXPECT_EQ(v[0].field, "nonLinguisticEvents.continuousEvents[1].label");
}

TEST(EmptyField, BlankStringsAreFlagged) {
  UasRecord r = speech_record();
  r.nonLinguisticEvents.description = "  ";
  r.nonLinguisticEvents.discreteEvents[0].characteristic = "";
  r.paralinguistics.accent = "";
  std::set<std::string> fields;
  for (const auto& v : check_logical_consistency(r, kOntology)) {
    EXPECT_EQ(v.code, ViolationCode::EmptyField);
    fields.insert(v.field);
  }
  EXPECT_EQ(fields, (std::set<std::string>{"nonLinguisticEvents.description",
                                           "nonLinguisticEvents.discreteEvents[0].characteristic",
                                           "paralinguistics.accent"}));
}

TEST(Duration, DefaultThresholds) {
  EXPECT_DOUBLE_EQ(kThresholds.maxDiscreteEventsPerSecond, 2.0);
  EXPECT_DOUBLE_EQ(kThresholds.maxDescriptionWordsPerSecond, 8.0);
  EXPECT_DOUBLE_EQ(kThresholds.minDurationSeconds, 0.2);
}

TEST(Duration, BoundariesAreInclusive) {
  UasRecord r = speech_record();
  r.nonLinguisticEvents.discreteEvents = {{"a", "x"}, {"b", "x"}};
  r.nonLinguisticEvents.description = "one two three four five six seven eight";
  EXPECT_TRUE(check_duration_alignment(r, 1.0, kThresholds).empty());
  r.nonLinguisticEvents.discreteEvents.push_back({"c", "x"});
  r.nonLinguisticEvents.description += " nine";
  const auto v = check_duration_alignment(r, 1.0, kThresholds);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].field, "nonLinguisticEvents.discreteEvents");
  EXPECT_EQ(v[1].field, "nonLinguisticEvents.description");
}

TEST(Duration, TooShortClip) {
  UasRecord r = speech_record();
  r.nonLinguisticEvents.discreteEvents.clear();
  r.nonLinguisticEvents.description = "x";
  EXPECT_TRUE(check_duration_alignment(r, 0.2, kThresholds).empty());
  const auto v = check_duration_alignment(r, 0.19, kThresholds);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].field, "durationSeconds");
}

TEST(Thresholds, JsonAndChecks) {
  const auto t = AlignmentThresholds::from_json(nlohmann::json::parse(R"({"maxDiscreteEventsPerSecond": 3})"));
  EXPECT_DOUBLE_EQ(t.maxDiscreteEventsPerSecond, 3.0);
  EXPECT_DOUBLE_EQ(t.minDurationSeconds, 0.2);
  EXPECT_THROW(AlignmentThresholds::from_json(nlohmann::json::parse(R"({"minDurationSeconds": 0})")), Error);
  EXPECT_THROW(AlignmentThresholds::from_json(nlohmann::json::parse(R"({"minDurationSeconds": "x"})")), Error);
}

TEST(Validate, AcceptsCleanEntry) {
  const auto report = validate(speech_entry(), kOntology, kThresholds);
  EXPECT_EQ(report.verdict, Verdict::Accept);
  EXPECT_TRUE(report.violations.empty());
  EXPECT_EQ(report.recordId, "s1");
}

TEST(Validate, ViolationsSortedByStageThenField) {
  UasRecord r = speech_record();
  r.paralinguistics.emotion = "Joy";                 // stage 1
  r.paralinguistics.timbre.reset();                  // stage 3
  r.nonLinguisticEvents.description = " ";           // stage 3
  CorpusEntry e = speech_entry(r);
  e.groundTruthTranscription = "Something else.";    // stage 2
  e.durationSeconds = 0.1;                           // stage 4
  const auto report = validate(e, kOntology, kThresholds);
  std::vector<std::pair<ViolationCode, std::string>> got;
  for (const auto& v : report.violations) got.emplace_back(v.code, v.field);
  const std::vector<std::pair<ViolationCode, std::string>> want = {
      {ViolationCode::OntologyViolation, "paralinguistics.emotion"},
      {ViolationCode::TranscriptionMismatch, "transcription"},
      {ViolationCode::EmptyField, "nonLinguisticEvents.description"},
      {ViolationCode::NullRuleViolation, "paralinguistics.timbre"},
      {ViolationCode::DurationContentMismatch, "durationSeconds"},
      {ViolationCode::DurationContentMismatch, "nonLinguisticEvents.discreteEvents"},
  };
  EXPECT_EQ(got, want);
}

TEST(Validate, MissingRecordOrGroundTruth) {
  CorpusEntry e = speech_entry();
  e.groundTruthTranscription.reset();
  try {
    validate(e, kOntology, kThresholds);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::MissingGroundTruth);
  }
  const auto report = validate_entry(e, kOntology, kThresholds);
  EXPECT_EQ(codes(report.violations), std::set{ViolationCode::TranscriptionMismatch});

  e.uas.reset();
  try {
    validate(e, kOntology, kThresholds);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::MissingUas);
  }
}

TEST(Validate, NonSpeechWithoutGroundTruthSkipsTranscriptionCheck) {
  CorpusEntry e;
  e.id = "m";
  e.domainTag = DomainTag::Music;
  e.durationSeconds = 10;
  e.uas = UasRecord{};
  e.uas->nonLinguisticEvents.description = "Piano.";
  EXPECT_EQ(validate(e, kOntology, kThresholds).verdict, Verdict::Accept);
}

TEST(Validate, IsDeterministicAndPure) {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto code = kAllViolationCodes[static_cast<std::size_t>(i) % kAllViolationCodes.size()];
    const CorpusEntry e = testgen::make_faulty_entry(rng, "x", code);
    const CorpusEntry copy = e;
    EXPECT_EQ(validate(e, kOntology, kThresholds), validate(e, kOntology, kThresholds));
    EXPECT_EQ(e, copy);
  }
}

TEST(Report, JsonRoundTrip) {
  ValidationReport r{"id-1", Verdict::Reject, {{ViolationCode::EmptyField, "a.b", "blank"}}};
  EXPECT_EQ(report_from_json(nlohmann::json::parse(serialize_report(r))), r);
  EXPECT_EQ(serialize_report(r),
            R"({"recordId":"id-1","verdict":"Reject","violations":[{"code":"EmptyField","field":"a.b","detail":"blank"}]})");
}

TEST(Nfc, NormalizesComposedForms) {
  EXPECT_EQ(nfc_normalize("A\xCC\x8A"), "\xC3\x85");
  EXPECT_EQ(nfc_normalize("plain"), "plain");
}

}  // namespace
}  // namespace uas
