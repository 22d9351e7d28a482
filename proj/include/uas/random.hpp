// include/uas/random.hpp

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
#include <random>
#include <string_view>

namespace uas {

using Rng = std::mt19937_64;

/// Draws uniformly from [0, bound) with rejection sampling so the sequence
/// is identical across standard library implementations.
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound);

/// Generator derived from (seed, key); used to give every record its own
/// stream so sharded or reordered processing stays deterministic.
Rng keyed_rng(std::uint64_t seed, std::string_view key);

}  // namespace uas
