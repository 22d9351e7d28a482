// src/qa.cpp

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

#include "uas/qa.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "qa_templates_builtin.hpp"
#include "uas/error.hpp"

namespace uas {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(QaKind kind) {
  switch (kind) {
    case QaKind::Direct: return "Direct";
    case QaKind::MultipleChoice: return "MultipleChoice";
    case QaKind::YesNo: return "YesNo";
  }
  return "Direct";
}

// ---------------------------------------------------------------------------

const TemplateBank& TemplateBank::builtin() {
  static const TemplateBank bank = from_json(json::parse(kBuiltinQaTemplates));
  return bank;
}

TemplateBank TemplateBank::from_json(const json& doc) {
  TemplateBank bank;
  try {
    for (const auto& [field, kinds] : doc.at("questions").items())
      for (const auto& [kind, list] : kinds.items())
        bank.questions_[field][kind] = list.get<std::vector<std::string>>();
    for (const auto& [field, list] : doc.at("presence").items())
      bank.presence_[field] = list.get<std::vector<std::string>>();
    for (const auto& [field, map] : doc.at("phrases").items())
      for (const auto& [label, phrase] : map.items()) bank.phrases_[field][label] = phrase.get<std::string>();
    for (const auto& [field, list] : doc.at("pools").items())
      bank.pools_[field] = list.get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("invalid template bank: ") + e.what());
  }
  return bank;
}

TemplateBank TemplateBank::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open template bank '" + path + "'");
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::ConfigError, "template bank '" + path + "' is not JSON");
  return from_json(doc);
}

const std::vector<std::string>& TemplateBank::questions(std::string_view field,
                                                        std::string_view kind) const {
  auto it = questions_.find(field);
  if (it != questions_.end()) {
    auto k = it->second.find(kind);
    if (k != it->second.end() && !k->second.empty()) return k->second;
  }
  throw Error(ErrorCode::ConfigError,
              "template bank has no " + std::string(kind) + " questions for " + std::string(field));
}

const std::vector<std::string>& TemplateBank::presence_questions(std::string_view field) const {
  auto it = presence_.find(field);
  if (it == presence_.end() || it->second.empty())
    throw Error(ErrorCode::ConfigError, "template bank has no presence questions for " + std::string(field));
  return it->second;
}

std::string TemplateBank::value_phrase(std::string_view field, std::string_view value) const {
  if (auto it = phrases_.find(field); it != phrases_.end())
    if (auto p = it->second.find(value); p != it->second.end()) return p->second;
  // Accents read as proper nouns; other free text is folded into the sentence.
  std::string phrase(value);
  if (field != "paralinguistics.accent" && phrase.size() > 1 &&
      std::isupper(static_cast<unsigned char>(phrase[0])) &&
      !std::isupper(static_cast<unsigned char>(phrase[1])))
    phrase[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(phrase[0])));
  return phrase;
}

const std::vector<std::string>& TemplateBank::pool(std::string_view field) const {
  static const std::vector<std::string> empty;
  auto it = pools_.find(field);
  return it == pools_.end() ? empty : it->second;
}

// ---------------------------------------------------------------------------

void QaGenConfig::check() const {
  if (optionsPerMcq < 3 || optionsPerMcq > 4)
    throw Error(ErrorCode::InvalidArgument, "optionsPerMcq must be 3 or 4");
  if (itemsPerRecord < 1) throw Error(ErrorCode::InvalidArgument, "itemsPerRecord must be positive");
  for (const auto& field : fieldsEnabled) {
    const bool known = field == "transcription" ||
                       std::find(kLeafFields.begin(), kLeafFields.end(), field) != kLeafFields.end();
    if (!known) throw Error(ErrorCode::InvalidArgument, "unknown QA field '" + field + "'");
  }
}

namespace {

bool is_event_list(std::string_view field) {
  return field == "nonLinguisticEvents.discreteEvents" || field == "nonLinguisticEvents.continuousEvents";
}

const std::vector<AcousticEvent>& events_of(const UasRecord& record, std::string_view field) {
  return field == "nonLinguisticEvents.discreteEvents" ? record.nonLinguisticEvents.discreteEvents
                                                        : record.nonLinguisticEvents.continuousEvents;
}

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

template <typename T>
const T& pick(const std::vector<T>& items, QaRng& rng) {
  return items[uniform_index(rng, items.size())];
}

std::string fill(std::string_view tpl, std::string_view value) {
  std::string out(tpl);
  const std::string_view key = "{value}";
  if (auto pos = out.find(key); pos != std::string::npos) out.replace(pos, key.size(), value);
  return out;
}

// Leaf value as a single answer string; nullopt when the field is absent.
std::optional<std::string> field_value(const UasRecord& record, std::string_view field) {
  if (const auto* slot = paralinguistic_field(record, field)) return *slot;
  if (field == "transcription") return record.transcription;
  if (field == "nonLinguisticEvents.description") return record.nonLinguisticEvents.description;
  if (is_event_list(field)) {
    const auto& events = events_of(record, field);
    if (events.empty()) return std::string("None");
    std::string joined;
    for (const auto& e : events) {
      if (!joined.empty()) joined += ", ";
      joined += e.label;
    }
    return joined;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown field '" + std::string(field) + "'");
}

// Pool values that cannot be mistaken for the true value(s).
std::vector<std::string> false_candidates(const std::vector<std::string>& pool,
                                          const std::vector<std::string>& truths) {
  std::vector<std::string> out;
  for (const auto& candidate : pool) {
    const std::string c = lower(candidate);
    const bool clashes = std::any_of(truths.begin(), truths.end(), [&](const std::string& t) {
      const std::string l = lower(t);
      return l.find(c) != std::string::npos || c.find(l) != std::string::npos;
    });
    if (!clashes) out.push_back(candidate);
  }
  return out;
}

// Draws k distinct items in random order (partial Fisher-Yates).
std::vector<std::string> sample_without_replacement(std::vector<std::string> items, std::size_t k,
                                                    QaRng& rng) {
  k = std::min(k, items.size());
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + uniform_index(rng, items.size() - i);
    std::swap(items[i], items[j]);
  }
  items.resize(k);
  return items;
}

}  // namespace

QaItem gen_direct_qa(const UasRecord& record, std::string_view field, QaRng& rng,
                     const TemplateBank& bank) {
  auto value = field_value(record, field);
  if (!value)
    throw Error(ErrorCode::FieldAbsent, "field '" + std::string(field) + "' is null in this record");
  QaItem item;
  item.kind = QaKind::Direct;
  item.question = pick(bank.questions(field, "direct"), rng);
  item.answer = std::move(*value);
  item.sourceField = std::string(field);
  return item;
}

QaItem gen_multiple_choice(const UasRecord& record, std::string_view field, const Ontology& ontology,
                           const QaGenConfig& config, QaRng& rng, const TemplateBank& bank) {
  config.check();
  std::string truth;
  std::vector<std::string> distractor_pool;
  std::size_t option_count = static_cast<std::size_t>(config.optionsPerMcq);

  if (is_categorical_field(field)) {
    const auto& slot = *paralinguistic_field(record, field);
    if (!slot) throw Error(ErrorCode::FieldAbsent, "field '" + std::string(field) + "' is null");
    truth = *slot;
    for (const auto& label : *ontology.closed_set(field))
      if (label != truth) distractor_pool.push_back(label);
    // Small closed sets (gender, age) cap the option count.
    option_count = std::min(option_count, distractor_pool.size() + 1);
    if (option_count < 2)
      throw Error(ErrorCode::InsufficientDistractors, "closed set for " + std::string(field) + " is too small");
  } else {
    std::vector<std::string> truths;
    if (is_event_list(field)) {
      const auto& events = events_of(record, field);
      if (events.empty()) throw Error(ErrorCode::FieldAbsent, "no events in " + std::string(field));
      for (const auto& e : events) truths.push_back(e.label);
      truth = pick(truths, rng);
    } else {
      auto value = field_value(record, field);
      if (!value) throw Error(ErrorCode::FieldAbsent, "field '" + std::string(field) + "' is null");
      truth = *value;
      truths.push_back(truth);
    }
    if (config.freeTextMcq) distractor_pool = false_candidates(bank.pool(field), truths);
    if (distractor_pool.size() + 1 < option_count)
      throw Error(ErrorCode::InsufficientDistractors,
                  "not enough distractors for " + std::string(field));
  }

  std::vector<std::string> texts = sample_without_replacement(distractor_pool, option_count - 1, rng);
  const std::size_t correct = uniform_index(rng, option_count);
  texts.insert(texts.begin() + static_cast<std::ptrdiff_t>(correct), truth);

  QaItem item;
  item.kind = QaKind::MultipleChoice;
  item.question = pick(bank.questions(field, "mcq"), rng);
  for (std::size_t i = 0; i < texts.size(); ++i)
    item.options.push_back({static_cast<char>('A' + i), texts[i]});
  item.answer = std::string(1, item.options[correct].letter) + ". " + truth;
  item.sourceField = std::string(field);
  return item;
}

QaItem gen_yesno(const UasRecord& record, std::string_view field, const Ontology& ontology, QaRng& rng,
                 const TemplateBank& bank) {
  QaItem item;
  item.kind = QaKind::YesNo;
  item.sourceField = std::string(field);
  const bool ask_truth = uniform_index(rng, 2) == 0;

  if (field == "transcription") {
    item.question = pick(bank.presence_questions(field), rng);
    item.answer = is_speech(record) ? "Yes" : "No";
    return item;
  }

  if (is_event_list(field)) {
    const auto& events = events_of(record, field);
    std::vector<std::string> labels;
    for (const auto& e : events) labels.push_back(e.label);
    const auto falses = false_candidates(bank.pool(field), labels);
    if (events.empty() || (ask_truth && uniform_index(rng, 2) == 0) || (!ask_truth && falses.empty())) {
      item.question = pick(bank.presence_questions(field), rng);
      item.answer = events.empty() ? "No" : "Yes";
      return item;
    }
    item.probe = ask_truth ? pick(labels, rng) : pick(falses, rng);
    item.question = fill(pick(bank.questions(field, "yesno"), rng), bank.value_phrase(field, item.probe));
    item.answer = ask_truth ? "Yes" : "No";
    return item;
  }

  const std::optional<std::string> value = field_value(record, field);
  std::vector<std::string> falses;
  if (const auto* set = ontology.closed_set(field)) {
    for (const auto& label : *set)
      if (!value || label != *value) falses.push_back(label);
  } else {
    falses = false_candidates(bank.pool(field), value ? std::vector<std::string>{*value}
                                                      : std::vector<std::string>{});
  }
  const bool use_truth = value && (ask_truth || falses.empty());
  if (!use_truth && falses.empty())
    throw Error(ErrorCode::InsufficientDistractors, "no value to ask about for " + std::string(field));
  item.probe = use_truth ? *value : pick(falses, rng);
  item.question = fill(pick(bank.questions(field, "yesno"), rng), bank.value_phrase(field, item.probe));
  item.answer = use_truth ? "Yes" : "No";
  return item;
}

std::vector<QaItem> gen_for_record(const UasRecord& record, std::string_view recordId,
                                   const Ontology& ontology, const QaGenConfig& config,
                                   const TemplateBank& bank) {
  config.check();
  QaRng rng = keyed_rng(config.rngSeed, recordId);
  const bool speech = is_speech(record);

  std::vector<std::string> targets;
  bool paralinguistics_enabled = false;
  for (std::string_view field : kLeafFields) {
    if (!config.fieldsEnabled.contains(field)) continue;
    if (const auto* slot = paralinguistic_field(record, field)) {
      paralinguistics_enabled = true;
      if (!*slot) continue;
    }
    targets.emplace_back(field);
  }
  const bool transcription_enabled = config.fieldsEnabled.contains("transcription");
  if (transcription_enabled || (!speech && paralinguistics_enabled)) targets.emplace_back("transcription");
  if (targets.empty()) return {};

  for (std::size_t i = targets.size(); i > 1; --i)
    std::swap(targets[i - 1], targets[uniform_index(rng, i)]);

  const std::size_t window = std::min<std::size_t>(targets.size(), config.itemsPerRecord);
  auto categorical = [](const std::string& f) { return is_categorical_field(f); };
  if (std::none_of(targets.begin(), targets.begin() + window, categorical)) {
    auto it = std::find_if(targets.begin() + window, targets.end(), categorical);
    if (it != targets.end()) std::swap(*it, targets[uniform_index(rng, window)]);
  }

  auto supported = [&](const std::string& field) {
    std::vector<QaKind> kinds;
    if (field == "transcription") {
      if (speech && transcription_enabled) kinds.push_back(QaKind::Direct);
      kinds.push_back(QaKind::YesNo);
      return kinds;
    }
    kinds.push_back(QaKind::Direct);
    if (is_categorical_field(field)) {
      kinds.push_back(QaKind::MultipleChoice);
    } else if (config.freeTextMcq) {
      std::vector<std::string> truths;
      if (is_event_list(field)) {
        for (const auto& e : events_of(record, field)) truths.push_back(e.label);
      } else if (auto v = field_value(record, field)) {
        truths.push_back(*v);
      }
      if (!truths.empty() &&
          false_candidates(bank.pool(field), truths).size() + 1 >= static_cast<std::size_t>(config.optionsPerMcq))
        kinds.push_back(QaKind::MultipleChoice);
    }
    kinds.push_back(QaKind::YesNo);
    return kinds;
  };

  std::set<QaKind> needed{QaKind::Direct, QaKind::MultipleChoice, QaKind::YesNo};
  std::map<std::string, std::set<QaKind>> used;
  std::vector<QaItem> items;
  items.reserve(config.itemsPerRecord);
  for (int i = 0; i < config.itemsPerRecord; ++i) {
    const std::string& field = targets[static_cast<std::size_t>(i) % targets.size()];
    const auto kinds = supported(field);
    auto filter = [&](bool want_needed, bool want_fresh) {
      std::vector<QaKind> out;
      for (auto k : kinds)
        if ((!want_needed || needed.contains(k)) && (!want_fresh || !used[field].contains(k)))
          out.push_back(k);
      return out;
    };
    QaKind kind;
    if (needed.contains(QaKind::MultipleChoice) &&
        std::find(kinds.begin(), kinds.end(), QaKind::MultipleChoice) != kinds.end()) {
      kind = QaKind::MultipleChoice;
    } else {
      auto candidates = filter(true, true);
      if (candidates.empty()) candidates = filter(true, false);
      if (candidates.empty()) candidates = filter(false, true);
      if (candidates.empty()) candidates = kinds;
      kind = pick(candidates, rng);
    }

    QaItem item;
    switch (kind) {
      case QaKind::Direct: item = gen_direct_qa(record, field, rng, bank); break;
      case QaKind::MultipleChoice: item = gen_multiple_choice(record, field, ontology, config, rng, bank); break;
      case QaKind::YesNo: item = gen_yesno(record, field, ontology, rng, bank); break;
    }
    item.recordId = std::string(recordId);
    needed.erase(kind);
    used[field].insert(kind);
    items.push_back(std::move(item));
  }
  return items;
}

// ---------------------------------------------------------------------------

std::string render_question(const QaItem& item) {
  std::string text = item.question;
  for (const auto& option : item.options) {
    text += ' ';
    text += option.letter;
    text += ". ";
    text += option.text;
  }
  return text;
}

ordered_json chat_to_json(const QaItem& item) {
  ordered_json text_part;
  text_part["type"] = "text";
  text_part["text"] = render_question(item);
  ordered_json user;
  user["role"] = "user";
  user["content"] = ordered_json::array({std::move(text_part)});
  ordered_json assistant;
  assistant["role"] = "assistant";
  assistant["content"] = item.answer;
  return ordered_json::array({std::move(user), std::move(assistant)});
}

std::string serialize_chat(const QaItem& item) {
  return chat_to_json(item).dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

ordered_json qa_meta_to_json(const QaItem& item) {
  ordered_json doc;
  doc["recordId"] = item.recordId;
  doc["sourceField"] = item.sourceField;
  doc["kind"] = std::string(to_string(item.kind));
  return doc;
}

ModelRequest build_qa_prompt(const UasRecord& record, char correctLetter) {
  if (correctLetter < 'A' || correctLetter > 'D')
    throw Error(ErrorCode::InvalidArgument,
                std::string("correct option must be a letter A-D, got '") + correctLetter + "'");
  ModelRequest request;
  request.kind = RequestKind::QaGen;
  request.prompt = render_template(
      kQaPromptTemplate, {{"correct_option", std::string(1, correctLetter)}, {"uas", serialize_canonical(record)}});
  request.maxOutputTokens = 1024;
  request.temperature = 0.7;
  return request;
}

}  // namespace uas
