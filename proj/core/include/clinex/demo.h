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

// End-to-end run on synthetic data: generate, annotate, curate with a
// simulated specialist, split, search per-class taggers, predict in the
// three modes and evaluate.

#ifndef CLINEX_DEMO_H_
#define CLINEX_DEMO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clinex/corpus.h"
#include "clinex/curation.h"
#include "clinex/eval.h"
#include "clinex/trainer.h"

namespace clinex {

struct DemoOptions {
  uint64_t seed = 7;
  size_t sentences = 500;
  size_t search_k = 20;
  size_t threads = 0;
  // Intermediate artifacts are written here when set.
  std::optional<std::string> out_dir;
};

struct ClassSearch {
  EntityClass cls = EntityClass::kDisease;
  size_t train_sentences = 0;
  size_t val_sentences = 0;
  std::vector<Trial> trials;
  size_t best_trial = 0;
};

struct DemoResult {
  size_t documents = 0;
  size_t sentences = 0;
  size_t candidates = 0;
  Progress curation;
  CorpusSplit split;
  std::vector<ClassSearch> searches;
  // Column groups UMLS, NER, NER & UMLS.
  Report report;
  // Everything above as text; identical for identical options.
  std::string text;
};

DemoResult RunDemo(const DemoOptions &options);

}  // namespace clinex

#endif  // CLINEX_DEMO_H_
