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

// Pipeline configuration: an INI file with sections, overridden key by key
// from the command line.
//
//   [general]  seed, language
//   [paths]    kb, glossary, semantic_groups
//   [matcher]  n, measure, alpha, max_window
//   [train]    learning_rate, batch_size, epochs, l2
//   [search]   k, threads
//   [link]     threshold, measure

#ifndef CLINEX_CONFIG_H_
#define CLINEX_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "clinex/crf.h"
#include "clinex/linker.h"
#include "clinex/matcher.h"

namespace clinex {

struct PipelineConfig {
  uint64_t seed = 0;
  std::string language = "POR";
  std::string kb_path;
  std::string glossary_path;
  std::string semantic_groups_path;  // built-in grouping when empty
  MatcherConfig matcher;
  TrainConfig train;
  size_t search_k = 20;
  size_t search_threads = 0;
  LinkConfig link;
};

// "section.key" names accepted in files and overrides.
const std::vector<std::string> &ConfigKeys();

// Reads the file (if any), applies the overrides in order, validates and
// checks that the referenced input files exist. Unknown keys, bad values
// and missing files throw DataError.
PipelineConfig ResolveConfig(const std::optional<std::string> &path,
                             const std::vector<std::pair<std::string, std::string>> &overrides);

// "section.key=value".
std::pair<std::string, std::string> ParseOverride(const std::string &text);

// INI text of a config.
std::string RenderConfig(const PipelineConfig &config);

}  // namespace clinex

#endif  // CLINEX_CONFIG_H_
