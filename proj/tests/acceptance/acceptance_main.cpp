// tests/acceptance/acceptance_main.cpp

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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "oracles.hpp"
#include "uas/audit.hpp"
#include "uas/qa.hpp"
#include "uas/schema.hpp"
#include "uas/synthesis.hpp"
#include "uas/validation.hpp"

using namespace uas;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

// --- audit table -------------------------------------------------------------

Outcome audit_table() {
  Outcome out;
  std::vector<audit::AuditTask> tasks;
  for (unsigned i = 0; i < oracle::kAuditN; ++i) {
    audit::AuditTask t;
    t.taskId = "task-" + std::to_string(i);
    t.entryId = "e" + std::to_string(i);
    tasks.push_back(t);
  }
  // Settled-correct patterns and settled-not-correct patterns, cycled so
  // every consensus path is exercised.
  using V = audit::JudgmentVerdict;
  const std::vector<std::array<V, 3>> yes = {{V::Correct, V::Correct, V::Correct},
                                             {V::Correct, V::Incorrect, V::Correct},
                                             {V::Unsure, V::Correct, V::Correct}};
  const std::vector<std::array<V, 3>> no = {{V::Incorrect, V::Incorrect, V::Incorrect},
                                            {V::Correct, V::Incorrect, V::Unsure},
                                            {V::Unsure, V::Unsure, V::Correct}};
  audit::JudgmentStore store;
  const char* annotators[] = {"ann-a", "ann-b", "ann-c"};
  for (const auto& row : oracle::kReferenceAuditRows) {
    for (unsigned i = 0; i < oracle::kAuditN; ++i) {
      const auto& votes = i < row.successes ? yes[i % yes.size()] : no[i % no.size()];
      for (int a = 0; a < 3; ++a)
        store.put({tasks[i].taskId, annotators[a], std::string(row.fieldPath), votes[a], 1700000000});
    }
  }
  const auto rows = audit::field_accuracy_report(store, tasks);
  if (rows.size() != 9) {
    out.fail("expected 9 rows");
    return out;
  }
  int ci_rows_within = 0;
  std::ostringstream note;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& printed = oracle::kReferenceAuditRows[i];
    const auto& row = rows[i];
    if (row.fieldPath != printed.fieldPath || row.n != oracle::kAuditN || !row.accuracy) {
      out.fail("row " + row.fieldPath + " has wrong shape");
      continue;
    }
    const double acc = *row.accuracy * 100.0;
    if (std::abs(acc - printed.accuracy) > 1e-9) out.fail(row.displayName + " accuracy " + std::to_string(acc));
    const double lo = row.ci->lower * 100.0, hi = row.ci->upper * 100.0;
    if (std::abs(lo - printed.lower) <= 0.01 && std::abs(hi - printed.upper) <= 0.01) ++ci_rows_within;
    if (printed.fieldPath == "nonLinguisticEvents.continuousEvents") {
      if (std::abs(lo - oracle::kContinuousLowerRecomputed) > 0.005)
        out.fail("continuous lower " + std::to_string(lo));
      if (std::abs(hi - printed.upper) > 0.01) out.fail("continuous upper " + std::to_string(hi));
      char buf[64];
      std::snprintf(buf, sizeof buf, "continuous lower %.2f vs printed %.2f", lo, printed.lower);
      note << buf;
    }
  }
  if (ci_rows_within != 8) out.fail(std::to_string(ci_rows_within) + "/9 CI rows within 0.01 (want 8)");
  if (out.pass) out.detail = "9/9 accuracies exact, 8/9 printed CIs within 0.01 pp, " + note.str();
  return out;
}

// --- Wilson properties -----------------------------------------------------------

Outcome wilson_properties() {
  Outcome out;
  Rng rng(20260317);
  std::size_t pairs = 0;
  for (; pairs < 12000; ++pairs) {
    const std::uint64_t n = 1 + uniform_index(rng, pairs % 3 == 0 ? 20 : 5000);
    const std::uint64_t s = uniform_index(rng, n + 1);
    const auto ci = audit::wilson_interval(s, n);
    const double p = static_cast<double>(s) / static_cast<double>(n);
    const std::string at = "(" + std::to_string(s) + "," + std::to_string(n) + ")";
    if (!(ci.lower <= p + 1e-12 && p <= ci.upper + 1e-12)) out.fail("p_hat outside interval at " + at);
    if (ci.lower < 0.0 || ci.upper > 1.0 || ci.lower > ci.upper) out.fail("bounds out of [0,1] at " + at);
    const auto mirror = audit::wilson_interval(n - s, n);
    if (std::abs(ci.lower - (1.0 - mirror.upper)) > 1e-12) out.fail("asymmetric at " + at);
    const auto bigger = audit::wilson_interval(2 * s, 2 * n);
    if (!(bigger.upper - bigger.lower < ci.upper - ci.lower)) out.fail("width not decreasing at " + at);
    const auto ref = oracle::wilson_by_roots(s, n);
    if (std::abs(ci.lower - static_cast<double>(ref.lower)) > 1e-9 ||
        std::abs(ci.upper - static_cast<double>(ref.upper)) > 1e-9)
      out.fail("disagrees with root oracle at " + at);
    if (s == 0 && ci.lower != 0.0) out.fail("lower bound not 0 at " + at);
    if (s == n && std::abs(ci.upper - 1.0) > 1e-12) out.fail("upper bound not 1 at " + at);
  }
  if (out.pass) out.detail = std::to_string(pairs) + " random (s,n) pairs, zero failures";
  return out;
}

// --- validation fault injection --------------------------------------------------

Outcome fault_injection() {
  Outcome out;
  const Ontology ontology;
  const AlignmentThresholds thresholds;
  Rng rng(7001);
  std::size_t faulty = 0;
  for (ViolationCode code : kAllViolationCodes) {
    for (int i = 0; i < 100; ++i, ++faulty) {
      const auto entry = testgen::make_faulty_entry(rng, "f" + std::to_string(faulty), code);
      const auto report = validate(entry, ontology, thresholds);
      std::set<ViolationCode> codes;
      for (const auto& v : report.violations) codes.insert(v.code);
      if (report.verdict != Verdict::Reject || codes != std::set<ViolationCode>{code}) {
        std::string got;
        for (auto c : codes) got += std::string(to_string(c)) + " ";
        out.fail(std::string(to_string(code)) + " fault produced {" + got + "}");
      }
    }
  }
  for (int i = 0; i < 1000; ++i) {
    const auto entry = testgen::random_valid_entry(rng, "v" + std::to_string(i));
    const auto report = validate(entry, ontology, thresholds);
    if (report.verdict != Verdict::Accept)
      out.fail("valid record " + entry.id + " rejected: " + std::string(to_string(report.violations[0].code)));
  }
  if (out.pass) out.detail = "7 codes x 100 faults exact, 1000 valid records accepted";
  return out;
}

// --- transcription integrity ----------------------------------------------------

std::vector<std::string> code_points(const std::string& s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    const std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : 4;
    out.push_back(s.substr(i, len));
    i += len;
  }
  return out;
}

std::string join(const std::vector<std::string>& cps) {
  std::string s;
  for (const auto& c : cps) s += c;
  return s;
}

Outcome transcription_mutations() {
  Outcome out;
  const std::vector<std::string> inserts = {"x", "Q", " ", ".", "é", "ß", "語", "0"};
  Rng rng(4242);
  std::size_t mutations = 0;
  for (int i = 0; i < 1000; ++i) {
    UasRecord record = testgen::random_record(rng, {.speech = true});
    const std::string truth = *record.transcription;
    if (!check_transcription_integrity(record, truth).empty()) out.fail("unmutated pair rejected: " + truth);
    const auto cps = code_points(truth);
    auto expect_reject = [&](std::vector<std::string> mutated, const char* what) {
      record.transcription = join(mutated);
      ++mutations;
      const auto v = check_transcription_integrity(record, truth);
      if (v.size() != 1 || v[0].code != ViolationCode::TranscriptionMismatch)
        out.fail(std::string(what) + " accepted: '" + *record.transcription + "'");
    };
    for (std::size_t pos = 0; pos <= cps.size(); ++pos) {
      auto ins = cps;
      ins.insert(ins.begin() + static_cast<std::ptrdiff_t>(pos), inserts[(pos + i) % inserts.size()]);
      expect_reject(ins, "insertion");
      if (pos == cps.size()) break;
      auto del = cps;
      del.erase(del.begin() + static_cast<std::ptrdiff_t>(pos));
      expect_reject(del, "deletion");
      auto sub = cps;
      std::string replacement = inserts[(pos + i + 3) % inserts.size()];
      if (replacement == sub[pos]) replacement = "z";
      if (replacement == sub[pos]) replacement = "y";
      sub[pos] = replacement;
      expect_reject(sub, "substitution");
    }
    record.transcription = truth;
  }
  if (out.pass) out.detail = "1000 pairs pass, " + std::to_string(mutations) + " single-character mutations rejected";
  return out;
}

// --- mock pipeline -----------------------------------------------------------

struct RunBytes {
  std::string accepted, rejected, failures;
  PipelineRunSummary summary;
  bool operator==(const RunBytes&) const = default;
};

Outcome mock_pipeline() {
  Outcome out;
  const std::string dir = UAS_DATA_DIR "/sample";
  const auto manifest = read_manifest_file(dir + "/manifest.jsonl");
  auto run = [&](int workers) {
    MockBackend backend(dir + "/fixtures");
    PipelineOptions options;
    options.workerCount = workers;
    std::ostringstream a, r, f;
    RunBytes bytes;
    bytes.summary = run_pipeline(manifest, backend, options, {&a, &r, &f});
    bytes.accepted = a.str();
    bytes.rejected = r.str();
    bytes.failures = f.str();
    return bytes;
  };
  const RunBytes first = run(1);
  if (first.summary.accepted != 8 || first.summary.rejected != 2 || first.summary.total != 10)
    out.fail("summary " + first.summary.to_json().dump());
  std::map<std::string, std::string> expected = {{"spk-004", "paralinguistics.emotion"},
                                                 {"spk-005", "paralinguistics.age"}};
  std::istringstream rejected(first.rejected);
  std::string line;
  while (std::getline(rejected, line)) {
    const auto report = report_from_json(nlohmann::json::parse(line));
    auto it = expected.find(report.recordId);
    if (it == expected.end() || report.violations.size() != 1 ||
        report.violations[0].code != ViolationCode::OntologyViolation || report.violations[0].field != it->second)
      out.fail("unexpected rejection " + line);
    else
      expected.erase(it);
  }
  if (!expected.empty()) out.fail("seeded fault not reported for " + expected.begin()->first);
  for (int workers : {1, 4, 8, 4, 8, 1})
    if (!(run(workers) == first)) out.fail("output differs with " + std::to_string(workers) + " workers");
  if (out.pass) out.detail = "accepted=8 rejected=2 (OntologyViolation x2), identical across workers 1/4/8 and reruns";
  return out;
}

// --- round trip -----------------------------------------------------------------

Outcome round_trip() {
  Outcome out;
  Rng rng(99);
  for (int i = 0; i < 1000; ++i) {
    const UasRecord record = testgen::random_record(
        rng, {.speech = i % 4 != 0, .sparseFreeText = i % 3 == 0, .exotic = true});
    const std::string bytes = serialize_canonical(record);
    const UasRecord back = parse_uas(bytes);
    if (!(back == record)) out.fail("parse(serialize(r)) != r for record " + std::to_string(i));
    if (serialize_canonical(back) != bytes) out.fail("serialization not stable for record " + std::to_string(i));
    // Key order and whitespace on input must not change the canonical bytes.
    nlohmann::json unordered = nlohmann::json::parse(bytes);
    if (serialize_canonical(parse_uas(unordered.dump(2))) != bytes)
      out.fail("canonical bytes depend on input layout for record " + std::to_string(i));
  }
  if (out.pass) out.detail = "1000 randomized records: identity and byte-determinism hold";
  return out;
}

// --- QA soundness -----------------------------------------------------------

Outcome qa_soundness() {
  Outcome out;
  const Ontology ontology;
  Rng rng(31337);
  std::size_t items = 0, records = 0;
  std::map<QaKind, std::size_t> by_kind;
  while (items < 10000) {
    const bool speech = records % 5 != 0;
    const UasRecord record = testgen::random_record(rng, {.speech = speech, .sparseFreeText = records % 7 == 0});
    QaGenConfig config;
    config.rngSeed = 5;
    config.itemsPerRecord = 9;
    config.freeTextMcq = records % 2 == 0;
    config.optionsPerMcq = records % 3 == 0 ? 3 : 4;
    const std::string id = "qa-" + std::to_string(records++);
    for (const auto& item : gen_for_record(record, id, ontology, config)) {
      ++items;
      ++by_kind[item.kind];
      if (auto why = oracle::qa_unsound(record, item); !why.empty()) out.fail(id + " " + item.sourceField + ": " + why);
      if (oracle::leaks_answer(record, item)) out.fail(id + " leaks its answer: " + item.question);
    }
  }

  // Correct-letter placement, on 10,000 draws per option count.
  std::ostringstream freq;
  for (int k : {4, 3}) {
    QaGenConfig config;
    config.optionsPerMcq = k;
    std::vector<std::size_t> counts(static_cast<std::size_t>(k));
    QaRng qrng = keyed_rng(11, "placement-" + std::to_string(k));
    for (int i = 0; i < 10000; ++i) {
      const UasRecord record = testgen::random_record(rng, {.speech = true});
      const QaItem item = gen_multiple_choice(record, "paralinguistics.emotion", ontology, config, qrng);
      ++counts[static_cast<std::size_t>(item.answer[0] - 'A')];
    }
    const double expected = 10000.0 / k;
    freq << (k == 4 ? "" : "; ") << k << " options:";
    for (std::size_t l = 0; l < counts.size(); ++l) {
      const double rel = (static_cast<double>(counts[l]) - expected) / expected;
      freq << ' ' << static_cast<char>('A' + l) << '=' << counts[l];
      if (std::abs(rel) > 0.05)
        out.fail(std::to_string(k) + "-option letter " + static_cast<char>('A' + l) + " off by " +
                 std::to_string(rel * 100) + "%");
    }
  }
  if (out.pass)
    out.detail = std::to_string(items) + " items sound (" + std::to_string(by_kind[QaKind::Direct]) + " direct, " +
                 std::to_string(by_kind[QaKind::MultipleChoice]) + " mcq, " +
                 std::to_string(by_kind[QaKind::YesNo]) + " yes/no), no leaks; " + freq.str();
  return out;
}

// --- QA coverage -----------------------------------------------------------------

Outcome qa_coverage() {
  Outcome out;
  const Ontology ontology;
  Rng rng(8080);
  QaGenConfig config;
  config.itemsPerRecord = 9;
  for (int i = 0; i < 100; ++i) {
    const UasRecord record = testgen::full_speech_record(rng);
    const std::string id = "cov-" + std::to_string(i);
    std::set<std::string> fields;
    std::set<QaKind> kinds;
    for (const auto& item : gen_for_record(record, id, ontology, config)) {
      fields.insert(item.sourceField);
      kinds.insert(item.kind);
    }
    for (auto f : kLeafFields)
      if (!fields.contains(std::string(f))) out.fail(id + " has no item for " + std::string(f));
    if (kinds.size() != 3) out.fail(id + " does not cover all three kinds");
  }
  if (out.pass) out.detail = "100 records x 9 items: all nine leaf fields and all three kinds per record";
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double limitSeconds;  // 0 means no runtime bound
  };
  const std::vector<Criterion> criteria = {
      {"audit-table-reproduction", audit_table, 1.0},
      {"wilson-oracle-properties", wilson_properties, 0.0},
      {"validation-fault-injection", fault_injection, 0.0},
      {"transcription-integrity", transcription_mutations, 0.0},
      {"mock-pipeline-end-to-end", mock_pipeline, 5.0},
      {"round-trip-serialization", round_trip, 0.0},
      {"qa-soundness-and-placement", qa_soundness, 0.0},
      {"qa-field-coverage", qa_coverage, 0.0},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limitSeconds > 0 && secs >= c.limitSeconds) outcome.fail("took " + std::to_string(secs) + " s");
    if (!outcome.pass) ++failures;
    std::printf("%s %-28s %7.3f s  %s\n", outcome.pass ? "PASS" : "FAIL", c.name, secs, outcome.detail.c_str());
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failures);
  return failures == 0 ? 0 : 1;
}
