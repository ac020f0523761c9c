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

// IOB corpora: encoding and decoding of mentions, CoNLL-style files, the
// seeded train/validation/test split and B/I/O statistics.

#ifndef CLINEX_CORPUS_H_
#define CLINEX_CORPUS_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clinex/kb.h"
#include "clinex/textprep.h"

namespace clinex {

// Label order matters: it is the tie-break order of the decoder.
enum class Iob : uint8_t { kB = 0, kI = 1, kO = 2 };

enum class Scheme { kUntyped, kTyped };

struct Tag {
  Iob iob = Iob::kO;
  std::optional<EntityClass> cls;  // set only in the typed scheme

  bool operator==(const Tag &) const = default;
};

std::string TagString(const Tag &tag);
// Parses "B", "I", "O", "B-Drug", "I-Disease", ...
std::optional<Tag> ParseTag(std::string_view s);

struct Mention {
  Span span;
  EntityClass cls = EntityClass::kDisease;

  auto operator<=>(const Mention &) const = default;
};

struct TaggedSentence {
  std::string doc_id;
  size_t sentence_index = 0;
  std::string text;
  std::vector<Token> tokens;
  std::vector<Tag> tags;
  Scheme scheme = Scheme::kTyped;
  // Class of every mention in an untyped sentence.
  std::optional<EntityClass> entity_class;

  bool operator==(const TaggedSentence &) const = default;
};

using Corpus = std::vector<TaggedSentence>;

// Throws DataError naming the offending position when the tags violate the
// scheme: length mismatch, I at position 0, I after O, I-X after B-Y/I-Y.
void ValidateTags(const TaggedSentence &s);

// Typed encoding of non-overlapping mentions over Tokenize(s.text). A span
// that does not sit on token boundaries is widened to the covering tokens
// and a warning is appended. Overlapping mentions (before or after
// widening) and mentions covering no token throw DataError.
TaggedSentence to_iob(const Sentence &s, const std::vector<Mention> &mentions,
                      std::vector<std::string> *warnings = nullptr);

// Mentions encoded in the tags; untyped sentences take entity_class.
std::vector<Mention> from_iob(const TaggedSentence &t);

// Untyped view of a typed sentence for one class: B-c/I-c become B/I and
// every other tag becomes O.
TaggedSentence ToUntyped(const TaggedSentence &typed, EntityClass c);

// Sentences of a typed corpus with at least one mention of class c, as
// untyped sentences.
Corpus ClassSubcorpus(const Corpus &typed, EntityClass c);

struct SplitSpec {
  double test_fraction = 0.20;
  double val_fraction_of_remainder = 0.20;
  uint64_t seed = 0;

  void Validate() const;
};

struct SplitSizes {
  size_t train = 0;
  size_t validation = 0;
  size_t test = 0;
};

// test = round(n * test_fraction); validation = round((n - test) * val
// fraction); train gets the rest.
SplitSizes ComputeSplitSizes(size_t n, const SplitSpec &spec);

struct CorpusSplit {
  Corpus train;
  Corpus validation;
  Corpus test;
};

// Seeded shuffle of sentence positions; test is taken first, then
// validation, then train. Throws DataError for fewer than 3 sentences.
CorpusSplit split(const Corpus &corpus, const SplitSpec &spec);

struct CorpusStats {
  size_t sentences = 0;
  size_t b_tokens = 0;
  size_t i_tokens = 0;
  size_t o_tokens = 0;

  size_t tokens() const { return b_tokens + i_tokens + o_tokens; }
  bool operator==(const CorpusStats &) const = default;
};

// Counts over the corpus as given (typed tags count as B/I regardless of
// class).
CorpusStats stats(const Corpus &corpus);

// Per-class columns (counts over ClassSubcorpus) plus the aggregated column.
struct StatsRow {
  std::map<EntityClass, CorpusStats> per_class;
  CorpusStats aggregated;
};
StatsRow StatsByClass(const Corpus &typed);

// Plain-text table: one row per (label, StatsRow), column groups
// Procedures | Drugs | Diseases | Aggregated, each Sent B I O.
std::string RenderStatsTable(const std::vector<std::pair<std::string, StatsRow>> &rows);

// CoNLL-style files: "# doc_id sentence_index" then one "TOKEN\tTAG" line
// per token, blank line after each sentence.
void WriteConll(const Corpus &corpus, std::ostream &out);

// Sentence text is rebuilt by joining tokens with single spaces. Untyped
// files need `untyped_class`; an all-O file is read as untyped when it is
// given, typed otherwise.
Corpus ReadConll(std::istream &in, const std::string &source,
                 std::optional<EntityClass> untyped_class = std::nullopt);
Corpus ReadConll(const std::string &path,
                 std::optional<EntityClass> untyped_class = std::nullopt);

// Builds a tagged sentence from tokens (spaces between tokens) and tags.
TaggedSentence MakeTaggedSentence(std::string doc_id, size_t sentence_index,
                                  const std::vector<std::string> &tokens,
                                  std::vector<Tag> tags, Scheme scheme,
                                  std::optional<EntityClass> entity_class = std::nullopt);

}  // namespace clinex

#endif  // CLINEX_CORPUS_H_
