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

// Document ingestion: NFKC normalization, rule based sentence segmentation,
// de-duplication, tokenization and glossary based abbreviation expansion.

#ifndef CLINEX_TEXTPREP_H_
#define CLINEX_TEXTPREP_H_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace clinex {

// Half-open byte range [start, end).
struct Span {
  size_t start = 0;
  size_t end = 0;

  size_t length() const { return end - start; }
  bool empty() const { return end <= start; }
  bool Overlaps(const Span &other) const {
    return start < other.end && other.start < end;
  }
  bool Contains(const Span &other) const {
    return start <= other.start && other.end <= end;
  }
  auto operator<=>(const Span &) const = default;
};

struct Token {
  std::string text;
  Span span;

  bool operator==(const Token &) const = default;
};

// Whitespace split, then leading and trailing punctuation code points are
// split off one token each. Internal punctuation stays ("120/80").
std::vector<Token> Tokenize(std::string_view text);

struct Note {
  std::string date;
  std::string context;
  Span body;
};

struct RawDocument {
  std::string doc_id;
  std::string text;
  // Disjoint, ordered, within text. Empty means the whole text is one body.
  std::vector<Note> notes;
};

// Reads a plain-text document. `doc_id` defaults to the file stem. When a
// sidecar with rows "offset\tdate\tcontext" exists, each row starts a note
// that runs to the next row's offset. Offsets in the sidecar refer to the
// raw file bytes; the returned document is NFKC-normalized and its note
// ranges are remapped accordingly.
RawDocument ReadDocument(const std::string &path,
                         const std::optional<std::string> &sidecar = std::nullopt,
                         const std::string &doc_id = "");

// Builds a document from in-memory text, applying NFKC.
RawDocument MakeDocument(std::string doc_id, std::string_view text,
                         std::vector<std::pair<size_t, std::pair<std::string, std::string>>>
                             note_headers = {});

struct Sentence {
  std::string doc_id;
  size_t sentence_index = 0;
  std::string text;
  Span source_span;

  bool operator==(const Sentence &) const = default;
};

// Splits note bodies into sentences. Boundaries: newlines; a run of
// . ! ? ; followed by whitespace and an uppercase letter or digit, except
// after a single-letter abbreviation ("J.") or a line-initial item number
// ("1."). Line-initial bullet markers (-, *, "1)", "2.") stay attached to
// their item.
std::vector<Sentence> segment(const RawDocument &doc);

// Keeps first occurrences; texts compare equal after trimming and collapsing
// whitespace runs.
std::vector<Sentence> dedupe(std::vector<Sentence> sentences);

// Abbreviation glossary. Keys are single tokens, matched case-sensitively.
class Glossary {
 public:
  Glossary() = default;

  // Reads rows "ABBREV\texpansion".
  static Glossary Load(const std::string &path);
  static Glossary Parse(std::istream &in, const std::string &source);

  // Throws DataError on an empty key, a key that is not exactly one token,
  // a key equal to its expansion, or an expansion containing a sentence
  // terminator.
  void Add(std::string_view abbreviation, std::string_view expansion);

  const std::string *Find(std::string_view token) const;
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<std::string, std::string, std::less<>> &entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

// Sentence text after glossary expansion, with a map back to the original.
// offset_map[i] is the original offset of normalized byte i; end_map[i] is
// the original exclusive end of the unit that produced byte i. Every byte of
// an expansion maps to the whole abbreviation.
struct NormalizedSentence {
  std::string original;
  std::string text;
  std::vector<size_t> offset_map;
  std::vector<size_t> end_map;

  // Maps a non-empty span of `text` to a span of `original`.
  Span ToOriginal(Span normalized) const;
};

NormalizedSentence expand_abbreviations(std::string_view sentence,
                                        const Glossary &glossary);
inline NormalizedSentence expand_abbreviations(const Sentence &s,
                                               const Glossary &glossary) {
  return expand_abbreviations(s.text, glossary);
}

}  // namespace clinex

#endif  // CLINEX_TEXTPREP_H_
