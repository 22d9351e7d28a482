// include/uas/error.hpp

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

#include <stdexcept>
#include <string>
#include <string_view>

namespace uas {

enum class ErrorCode {
  MalformedDocument,
  SchemaShapeError,
  ManifestReadError,
  ConfigError,
  MissingUas,
  MissingGroundTruth,
  EmptyAudioRef,
  EmptyCaption,
  NoJsonFound,
  FieldAbsent,
  InsufficientDistractors,
  InvalidArgument,
  CorpusTooSmall,
  StoreError,
};

std::string_view to_string(ErrorCode code);

/// Error raised by every toolkit operation; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace uas
