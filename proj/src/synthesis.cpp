// src/synthesis.cpp

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

#include "uas/synthesis.hpp"

#include "uas/error.hpp"

namespace uas {

std::string_view to_string(RequestKind kind) {
  switch (kind) {
    case RequestKind::Caption: return "caption";
    case RequestKind::Synthesis: return "synthesis";
    case RequestKind::QaGen: return "qagen";
  }
  return "caption";
}

void check_request(const ModelRequest& request) {
  if (request.kind == RequestKind::Caption && (!request.audioRef || request.audioRef->empty()))
    throw Error(ErrorCode::InvalidArgument, "caption requests must carry an audio reference");
  if (request.kind != RequestKind::Caption && request.audioRef)
    throw Error(ErrorCode::InvalidArgument,
                std::string(to_string(request.kind)) + " requests must not carry audio");
  if (request.maxOutputTokens <= 0)
    throw Error(ErrorCode::InvalidArgument, "maxOutputTokens must be positive");
  if (!(request.temperature >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "temperature must be non-negative");
}

std::string render_template(std::string_view tpl,
                            const std::map<std::string, std::string, std::less<>>& values) {
  std::string out;
  out.reserve(tpl.size());
  std::size_t pos = 0;
  while (pos < tpl.size()) {
    const std::size_t open = tpl.find("${", pos);
    if (open == std::string_view::npos) {
      out.append(tpl.substr(pos));
      break;
    }
    const std::size_t close = tpl.find('}', open + 2);
    if (close == std::string_view::npos)
      throw Error(ErrorCode::InvalidArgument, "unterminated placeholder in template");
    out.append(tpl.substr(pos, open - pos));
    const std::string_view name = tpl.substr(open + 2, close - open - 2);
    auto it = values.find(name);
    if (it == values.end())
      throw Error(ErrorCode::InvalidArgument, "no value for placeholder ${" + std::string(name) + "}");
    out.append(it->second);
    pos = close + 1;
  }
  return out;
}

ModelRequest build_caption_request(const CorpusEntry& entry, const RequestDefaults& defaults) {
  if (entry.audioRef.empty())
    throw Error(ErrorCode::EmptyAudioRef, "entry '" + entry.id + "' has an empty audioRef");
  ModelRequest request;
  request.kind = RequestKind::Caption;
  request.prompt = std::string(kCaptionPromptTemplate);
  request.audioRef = entry.audioRef;
  request.maxOutputTokens = defaults.captionMaxTokens;
  request.temperature = defaults.captionTemperature;
  request.entryId = entry.id;
  return request;
}

ModelRequest build_synthesis_request(std::string_view caption,
                                     const std::optional<std::string>& groundTruth,
                                     const RequestDefaults& defaults) {
  if (caption.empty()) throw Error(ErrorCode::EmptyCaption, "caption is empty");
  std::string tail = "\n\nAudio description:\n${caption}\n";
  std::map<std::string, std::string, std::less<>> values{{"caption", std::string(caption)}};
  if (groundTruth) {
    tail +=
        "\nGround-truth transcription:\n${transcription}\n"
        "\nCopy the ground-truth transcription above verbatim into the `transcription` field. "
        "Do not correct, normalize, translate, or paraphrase it.\n";
    values.emplace("transcription", *groundTruth);
  }
  ModelRequest request;
  request.kind = RequestKind::Synthesis;
  request.prompt = std::string(kSynthesisPromptTemplate) + render_template(tail, values);
  request.maxOutputTokens = defaults.synthesisMaxTokens;
  request.temperature = defaults.synthesisTemperature;
  return request;
}

namespace {

// End offset (one past the closing brace) of the object opening at `open`,
// or npos when the braces never balance.
std::size_t balanced_object_end(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) escaped = false;
      else if (c == '\\') escaped = true;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return i + 1;
  }
  return std::string_view::npos;
}

}  // namespace

std::string extract_json(std::string_view modelOutput) {
  for (std::size_t open = modelOutput.find('{'); open != std::string_view::npos;
       open = modelOutput.find('{', open + 1)) {
    const std::size_t end = balanced_object_end(modelOutput, open);
    if (end == std::string_view::npos) continue;
    const std::string_view candidate = modelOutput.substr(open, end - open);
    if (nlohmann::json::accept(candidate.begin(), candidate.end())) return std::string(candidate);
    // Objects nested in a rejected candidate are not top level.
    open = end - 1;
  }
  throw Error(ErrorCode::NoJsonFound, "model output contains no JSON object");
}

}  // namespace uas
