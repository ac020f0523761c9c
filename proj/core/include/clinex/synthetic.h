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

// Seeded toy clinical data: a small Portuguese concept dictionary over the
// three classes plus noise concepts, an abbreviation glossary, and notes
// generated from sentence templates with known mentions.
//
// Noise comes in three kinds: vague dictionary terms with relevant semantic
// types ("tratamento", "dor"), terms whose semantic types fall outside the
// grouping ("paciente", "mama"), and out-of-dictionary words in entity
// contexts ("própolis", "acupuntura").

#ifndef CLINEX_SYNTHETIC_H_
#define CLINEX_SYNTHETIC_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "clinex/corpus.h"
#include "clinex/kb.h"
#include "clinex/textprep.h"

namespace clinex {

struct SyntheticData {
  KnowledgeBase kb;
  Glossary glossary;
  std::vector<RawDocument> documents;
  // Mentions of every generated sentence, keyed by sentence text.
  std::map<std::string, std::vector<Mention>> truth;
};

// Generates documents until segmentation plus de-duplication yields at
// least `target_sentences` sentences.
SyntheticData GenerateSynthetic(uint64_t seed, size_t target_sentences = 500);

// Toy dictionary only (language "POR").
KnowledgeBase SyntheticKb();
Glossary SyntheticGlossary();

}  // namespace clinex

#endif  // CLINEX_SYNTHETIC_H_
