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

// Dictionary auto-annotation of sentences and its JSON-lines record format:
//
//   {"doc_id":..,"sentence_index":..,"text":..,
//    "matches":[{"start":..,"end":..,"cui":..,"tui_set":[..],"score":..,
//                "class":..}]}
//
// Offsets are byte offsets into "text".

#ifndef CLINEX_ANNOTATION_H_
#define CLINEX_ANNOTATION_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clinex/kb.h"
#include "clinex/matcher.h"
#include "clinex/textprep.h"

namespace clinex {

// Picks the class for a set of TUIs: `preferred` if one of the TUIs maps to
// it, otherwise the highest priority class (Disease > Procedure > Drug).
// Returns the chosen TUI too (the smallest TUI of the chosen class).
struct ClassChoice {
  EntityClass cls;
  std::string tui;
};
std::optional<ClassChoice> ResolveClass(const std::vector<std::string> &tuis,
                                        const SemanticGroupMap &map,
                                        std::optional<EntityClass> preferred = std::nullopt);

struct AnnotatedMatch {
  Span span;
  std::string cui;
  std::vector<std::string> tuis;
  double score = 0.0;
  EntityClass cls = EntityClass::kDisease;

  bool operator==(const AnnotatedMatch &) const = default;
};

struct AnnotatedSentence {
  std::string doc_id;
  size_t sentence_index = 0;
  std::string text;
  std::vector<AnnotatedMatch> matches;

  bool operator==(const AnnotatedSentence &) const = default;
};

std::string ToJsonLine(const AnnotatedSentence &s);

// Throws DataError (with line number) on malformed lines.
AnnotatedSentence ParseAnnotationLine(std::string_view line, const std::string &source,
                                      size_t line_no);
std::vector<AnnotatedSentence> ReadAnnotations(std::istream &in, const std::string &source);
std::vector<AnnotatedSentence> ReadAnnotations(const std::string &path);

// High-recall dictionary annotation. Holds references to its assets.
class Annotator {
 public:
  // The index should be built with cfg.tui_filter = map.AllTuis().
  Annotator(const NGramIndex &index, const SemanticGroupMap &map,
            const Glossary &glossary, MatcherConfig cfg)
      : index_(index), map_(map), glossary_(glossary), cfg_(std::move(cfg)) {}

  AnnotatedSentence Annotate(const Sentence &sentence) const;

 private:
  const NGramIndex &index_;
  const SemanticGroupMap &map_;
  const Glossary &glossary_;
  MatcherConfig cfg_;
};

}  // namespace clinex

#endif  // CLINEX_ANNOTATION_H_
