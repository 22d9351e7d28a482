// include/uas/qa.hpp

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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "uas/random.hpp"
#include "uas/schema.hpp"
#include "uas/synthesis.hpp"

namespace uas {

enum class QaKind { Direct, MultipleChoice, YesNo };

std::string_view to_string(QaKind kind);

struct QaOption {
  char letter = 'A';
  std::string text;

  friend bool operator==(const QaOption&, const QaOption&) = default;
};

struct QaItem {
  QaKind kind = QaKind::Direct;
  std::string question;             // stem only; MCQ options live in `options`
  std::vector<QaOption> options;    // MultipleChoice only
  std::string answer;               // "L. value" for MultipleChoice
  std::string sourceField;
  std::string recordId;
  // YesNo only: the value the question asks about (empty for existence
  // questions). Kept so answers can be re-derived from the record.
  std::string probe;

  friend bool operator==(const QaItem&, const QaItem&) = default;
};

/// Question paraphrases, value phrasings and false-value pools, loaded from a
/// JSON document. The default bank is compiled in from data/qa_templates.json.
class TemplateBank {
 public:
  static const TemplateBank& builtin();
  static TemplateBank from_json(const nlohmann::json& doc);
  static TemplateBank from_file(const std::string& path);

  /// Paraphrases for (field, kind); kind is "direct", "mcq" or "yesno".
  const std::vector<std::string>& questions(std::string_view field, std::string_view kind) const;
  /// Existence question paraphrases for "transcription" and the event lists.
  const std::vector<std::string>& presence_questions(std::string_view field) const;
  /// How a categorical label reads inside a yes/no question ("Anger" -> "angry").
  std::string value_phrase(std::string_view field, std::string_view value) const;
  /// Candidate false values for yes/no questions on free-text fields.
  const std::vector<std::string>& pool(std::string_view field) const;

 private:
  using Bank = std::map<std::string, std::map<std::string, std::vector<std::string>, std::less<>>,
                        std::less<>>;
  Bank questions_;
  std::map<std::string, std::vector<std::string>, std::less<>> presence_;
  std::map<std::string, std::map<std::string, std::string, std::less<>>, std::less<>> phrases_;
  std::map<std::string, std::vector<std::string>, std::less<>> pools_;
};

struct QaGenConfig {
  int optionsPerMcq = 4;
  int itemsPerRecord = 6;
  std::uint64_t rngSeed = 0;
  std::set<std::string, std::less<>> fieldsEnabled{kLeafFields.begin(), kLeafFields.end()};
  // Allows MCQ on free-text fields, with distractors drawn from the bank pools.
  bool freeTextMcq = false;

  void check() const;
};

using QaRng = Rng;

QaItem gen_direct_qa(const UasRecord& record, std::string_view field, QaRng& rng,
                     const TemplateBank& bank = TemplateBank::builtin());

QaItem gen_multiple_choice(const UasRecord& record, std::string_view field, const Ontology& ontology,
                           const QaGenConfig& config, QaRng& rng,
                           const TemplateBank& bank = TemplateBank::builtin());

QaItem gen_yesno(const UasRecord& record, std::string_view field, const Ontology& ontology, QaRng& rng,
                 const TemplateBank& bank = TemplateBank::builtin());

/// Mixed-kind items for one record. The rng is seeded from
/// (config.rngSeed, recordId), so output does not depend on call order.
std::vector<QaItem> gen_for_record(const UasRecord& record, std::string_view recordId,
                                   const Ontology& ontology, const QaGenConfig& config,
                                   const TemplateBank& bank = TemplateBank::builtin());

/// Question text as shown to the model: stem plus inline "A. x B. y" options.
std::string render_question(const QaItem& item);

/// Two-turn chat array: user question, assistant answer.
std::string serialize_chat(const QaItem& item);
nlohmann::ordered_json chat_to_json(const QaItem& item);
nlohmann::ordered_json qa_meta_to_json(const QaItem& item);

/// Request for the LLM-backed alternative generator. correctLetter in A-D.
ModelRequest build_qa_prompt(const UasRecord& record, char correctLetter);

}  // namespace uas
