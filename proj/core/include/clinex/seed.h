// Copyright 2026 The clinex Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Stage seeds derived from one master seed.

#ifndef CLINEX_SEED_H_
#define CLINEX_SEED_H_

#include <cstdint>
#include <string_view>

namespace clinex {

inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed for the stage named `label` (e.g. "split", "search.drug").
inline uint64_t DeriveSeed(uint64_t master, std::string_view label) {
  uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return SplitMix64(master ^ SplitMix64(h));
}

inline uint64_t DeriveSeed(uint64_t master, uint64_t index) {
  return SplitMix64(SplitMix64(master) + index);
}

}  // namespace clinex

#endif  // CLINEX_SEED_H_
