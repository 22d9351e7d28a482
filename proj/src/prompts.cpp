// src/prompts.cpp

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

#include <string_view>

#include "uas/synthesis.hpp"

namespace uas {

// Reconstructed; no upstream captioner prompt is available.
const std::string_view kCaptionPromptTemplate = R"PROMPT(Listen to the attached audio clip and write a detailed acoustic caption.

If human speech is present, describe the speaker characteristics in detail:
- age: the apparent age group of the speaker
- gender: the apparent gender of the speaker
- emotion: the emotional state conveyed by the voice
- accent: the accent or language variety
- prosody: rhythm, pitch, pace, emphasis, and intonation
- timbre: the tonal quality of the voice (for example nasal, breathy, warm, bright)

Describe all non-speech sound as well:
- the background environment or recording context
- discrete sounds: one-shot or instantaneous events such as a door slam or a car horn
- continuous sounds: ambient noise, persistent background sounds, or music

If there is no human voice, say so explicitly and describe only the non-speech content. Do not transcribe the speech.)PROMPT";

const std::string_view kSynthesisPromptTemplate = R"PROMPT(Given a detailed description of an audio sample, output a JSON object containing the following audio features:

- **transcription**: If human speech is present, provide an accurate transcription of the spoken content in the original language. If there is no human voice, set this field to null.
- **paralinguistics**: If human voice is present, provide the following fields:  
  - `age`: One of `Child`, `Adult`, or `Elderly`.
  - `gender`: Specify as `Male` or `Female`.
  - `emotion`: This field MUST use ONE of the following seven specific categories: `Anger`, `Disgust`, `Sadness`, `Happiness`, `Neutral`, `Surprise`, `Fear`. Only these values are allowed.
  - `accent`: Describe the accent or variety of language used (e.g., `Standard Mandarin Chinese`, `American English`, etc.).
  - `prosody`: Summarize prosodic features, which refer to the patterns of rhythm, pitch, pace, emphasis, and intonation in speech (i.e., how something is said).
  - `timbre`: Briefly describe the timbre of the voice. **Timbre** refers to the unique tonal quality or color of a sound that distinguishes one voice or instrument from another, independent of pitch and loudness. For example, descriptors may include "nasal," "breathy," "warm," "bright," "harsh," or "gentle."

  **Note:** Timbre is *not* the same as prosody; prosody relates to temporal and pitch-based features, while timbre describes the characteristic sound qualities.

  If there is no human voice, set all fields in the `paralinguistics` object to null.
- **nonLinguisticEvents**:
  - `description`: A summary sentence describing general non-speech audio characteristics or context.
  - `discreteEvents`: A list of discrete (one-shot or instantaneous) non-linguistic events (such as a car horn, a door slam). Each item must contain a unique `label` and a brief `characteristic` describing its intensity, duration, or other relevant attribute. (e.g., `label`: `"Car horn"`, `characteristic`: `"Short, loud"`). Event labels must not repeat.
  - `continuousEvents`: A list of continuous or background non-linguistic events (such as engine noise, wind, music), again with a unique `label` and a brief `characteristic` descriptor.

Always follow these rules:
- If the audio contains **no human voice**, set `transcription` and all fields inside `paralinguistics` to null.
- For `emotion`, ONLY USE ONE OF THESE: `Anger`, `Disgust`, `Sadness`, `Happiness`, `Neutral`, `Surprise`, `Fear`.
- Ensure that all event `labels` are unique and clearly indicate what type of sound or event they refer to.

Respond ONLY with a JSON object as output (do not include any preamble, explanation, or extra formatting), with all required fields. Use the formats and categories exactly as described above.)PROMPT";

const std::string_view kQaPromptTemplate = R"PROMPT(**Instructions:**
You are given a structured audio description in UAS (Unified Audio Schema) JSON format. Please generate a relevant question in the form of a **Multiple Choice** question, along with the corresponding answer, based on the specific fields provided in the JSON (such as transcription, paralinguistics, or non-linguistic events).

**Requirements:**
- Provide 3-4 answer options. Each option must include both the letter and the content (e.g., "A. male", "B. female").
- The question can pertain to specific attributes found in the UAS structure, such as:
  - The speaker's gender, age, emotion, accent, prosody, and timbre (from `paralinguistics`).
  - Specific sounds or events (from `discreteEvents` or `continuousEvents`).
  - The content of speech (from `transcription`).
- The question text must not directly reveal or hint at the answer; answering must require information from the audio, and not be possible by simply reading the question.
- Do not include phrases like "according to the JSON" or "in the paralinguistics field".
- The correct answer must be option ${correct_option}.

**Input Format:**
A JSON object containing `transcription`, `paralinguistics`, and `nonLinguisticEvents`.

**Output Format:**
Present your output in the following JSON format:
```json
[
    {"role": "user", "content": [{"type": "text", "text": "question_text"}]},
    {"role": "assistant", "content": "answer_text"}
]
```

**Now, generate a question and its answer for the following UAS input using the above guidelines:**

${uas})PROMPT";

}  // namespace uas
