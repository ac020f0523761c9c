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

// Prediction pipeline: per-class taggers, conflict resolution, linking of
// the surviving spans to the knowledge base, and the final class taken from
// the linked concept's semantic type.

#ifndef CLINEX_LINKER_H_
#define CLINEX_LINKER_H_

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clinex/corpus.h"
#include "clinex/crf.h"
#include "clinex/features.h"
#include "clinex/kb.h"
#include "clinex/matcher.h"
#include "clinex/textprep.h"

namespace clinex {

enum class Mode { kUmlsOnly, kNerOnly, kNerUmls };

inline constexpr std::array<Mode, 3> kModes = {Mode::kUmlsOnly, Mode::kNerOnly,
                                               Mode::kNerUmls};

// "umls_only", "ner_only", "ner_umls".
std::string_view ModeName(Mode m);
// "UMLS", "NER", "NER & UMLS".
std::string_view ModeTitle(Mode m);
std::optional<Mode> ParseMode(std::string_view name);

// Decode of one per-class model over a tokenized sentence.
struct ClassDecode {
  EntityClass cls;
  std::vector<std::string> tokens;
  DecodeResult decode;
};

struct Candidate {
  size_t token_begin = 0;
  size_t token_end = 0;
  Span span;
  EntityClass source = EntityClass::kDisease;
  double confidence = 0.0;

  bool operator==(const Candidate &) const = default;
};

// Mentions of every decode; overlaps across models are resolved by higher
// confidence, then longer span, then leftmost start. Output is sorted by
// start. Throws DataError if a decode's tokens differ from `tokens`.
std::vector<Candidate> merge_predictions(const std::vector<Token> &tokens,
                                         const std::vector<ClassDecode> &decodes);

struct LinkConfig {
  double threshold = 0.9;
  Similarity measure = Similarity::kJaccard;

  void Validate() const;
};

struct LinkedEntity {
  Span span;
  std::string text;
  std::optional<std::string> cui;
  std::optional<std::string> tui;
  EntityClass cls = EntityClass::kDisease;
  std::optional<double> similarity;
  std::optional<double> confidence;
  std::optional<EntityClass> source;

  bool operator==(const LinkedEntity &) const = default;
};

// Looks up the glossary-expanded span text at the link threshold. The best
// hit gives the CUI; its class is the source class if one of its TUIs maps
// there, otherwise the highest priority mapped class. No hit (or no mapped
// TUI) discards the candidate.
std::optional<LinkedEntity> link(const Candidate &candidate, std::string_view sentence,
                                 const NGramIndex &index, const SemanticGroupMap &map,
                                 const Glossary &glossary, const LinkConfig &cfg);

// Everything prediction may need. The index should be built with the
// relevant TUIs of all classes as filter.
struct PredictAssets {
  const NGramIndex *index = nullptr;
  const SemanticGroupMap *map = nullptr;
  const Glossary *glossary = nullptr;
  MatcherConfig matcher;
  LinkConfig link;
  std::map<EntityClass, const CrfModel *> models;
  const TokenFeaturizer *featurizer = nullptr;
};

// umls_only: dictionary scan of the sentence. ner_only: merged tagger
// output classed by source model. ner_umls: merged tagger output, linked,
// unlinked spans dropped. Throws DataError when the mode lacks an asset.
std::vector<LinkedEntity> predict(std::string_view sentence, Mode mode,
                                  const PredictAssets &assets);

std::vector<Mention> ToMentions(const std::vector<LinkedEntity> &entities);

// {"doc_id":..,"sentence_index":..,"text":..,"mode":..,"entities":[...]}
std::string PredictionJsonLine(const std::string &doc_id, size_t sentence_index,
                               const std::string &text, Mode mode,
                               const std::vector<LinkedEntity> &entities);

}  // namespace clinex

#endif  // CLINEX_LINKER_H_
