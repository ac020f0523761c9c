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

#include "clinex/textprep.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_set>

#include "clinex/error.h"
#include "clinex/unicode.h"

namespace clinex {

namespace {

struct CodePoint {
  char32_t value;
  size_t start;
  size_t end;
};

std::vector<CodePoint> Decode(std::string_view text, size_t begin, size_t end) {
  std::vector<CodePoint> out;
  size_t pos = begin;
  while (pos < end) {
    size_t start = pos;
    char32_t c = NextCodePoint(text.substr(0, end), pos);
    out.push_back({c, start, pos});
  }
  return out;
}

bool IsTerminal(char32_t c) { return c == '.' || c == '!' || c == '?' || c == ';'; }

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Emits trimmed pieces of [begin, end) as sentences.
void EmitSentence(const RawDocument &doc, size_t begin, size_t end,
                  std::vector<Sentence> &out) {
  std::string_view piece(doc.text.data() + begin, end - begin);
  std::string_view trimmed = Trim(piece);
  if (trimmed.empty()) return;
  size_t start = begin + static_cast<size_t>(trimmed.data() - piece.data());
  out.push_back(Sentence{doc.doc_id, out.size(), std::string(trimmed),
                         Span{start, start + trimmed.size()}});
}

// True if the code points [0, idx) of the line, ignoring leading whitespace,
// are all digits: a line-initial item number such as "12".
bool IsItemNumberPrefix(const std::vector<CodePoint> &cps, size_t idx) {
  size_t i = 0;
  while (i < idx && IsSpace(cps[i].value)) ++i;
  if (i == idx) return false;
  for (; i < idx; ++i) {
    if (!IsDigit(cps[i].value)) return false;
  }
  return true;
}

// True if the code point before idx is a lone letter: "J." in "Dr. J. Silva".
bool IsSingleLetterBefore(const std::vector<CodePoint> &cps, size_t idx) {
  if (idx == 0 || !IsAlpha(cps[idx - 1].value)) return false;
  if (idx == 1) return true;
  char32_t before = cps[idx - 2].value;
  return IsSpace(before) || IsPunct(before);
}

void SegmentLine(const RawDocument &doc, size_t begin, size_t end,
                 std::vector<Sentence> &out) {
  std::vector<CodePoint> cps = Decode(doc.text, begin, end);
  size_t piece_start = begin;
  size_t i = 0;
  while (i < cps.size()) {
    if (!IsTerminal(cps[i].value)) {
      ++i;
      continue;
    }
    size_t run_begin = i;
    size_t run_end = i;
    while (run_end < cps.size() && IsTerminal(cps[run_end].value)) ++run_end;
    i = run_end;
    if (run_end == cps.size() || !IsSpace(cps[run_end].value)) continue;
    size_t next = run_end;
    while (next < cps.size() && IsSpace(cps[next].value)) ++next;
    if (next == cps.size()) continue;
    char32_t lead = cps[next].value;
    if (!IsUpper(lead) && !IsDigit(lead)) continue;
    bool lone_period = run_end - run_begin == 1 && cps[run_begin].value == '.';
    if (lone_period && (IsSingleLetterBefore(cps, run_begin) ||
                        IsItemNumberPrefix(cps, run_begin))) {
      continue;
    }
    EmitSentence(doc, piece_start, cps[run_end - 1].end, out);
    piece_start = cps[next].start;
  }
  EmitSentence(doc, piece_start, end, out);
}

void SegmentBody(const RawDocument &doc, Span body, std::vector<Sentence> &out) {
  size_t line_start = body.start;
  for (size_t pos = body.start; pos < body.end; ++pos) {
    if (doc.text[pos] == '\n') {
      SegmentLine(doc, line_start, pos, out);
      line_start = pos + 1;
    }
  }
  SegmentLine(doc, line_start, body.end, out);
}

// Normalizes pieces [cuts[i], cuts[i+1]) independently and returns the new
// text with the remapped cut positions.
std::pair<std::string, std::vector<size_t>> NormalizePieces(
    std::string_view raw, const std::vector<size_t> &cuts) {
  std::string text;
  std::vector<size_t> remapped;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    remapped.push_back(text.size());
    text += Nfkc(raw.substr(cuts[i], cuts[i + 1] - cuts[i]));
  }
  remapped.push_back(text.size());
  return {std::move(text), std::move(remapped)};
}

}  // namespace

std::vector<Token> Tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::vector<CodePoint> cps = Decode(text, 0, text.size());
  auto emit = [&](size_t from, size_t to) {
    tokens.push_back(Token{std::string(text.substr(from, to - from)), Span{from, to}});
  };
  size_t i = 0;
  while (i < cps.size()) {
    if (IsSpace(cps[i].value)) {
      ++i;
      continue;
    }
    size_t chunk_end = i;
    while (chunk_end < cps.size() && !IsSpace(cps[chunk_end].value)) ++chunk_end;
    size_t lo = i;
    size_t hi = chunk_end;
    while (lo < hi && IsPunct(cps[lo].value)) {
      emit(cps[lo].start, cps[lo].end);
      ++lo;
    }
    size_t trailing_begin = hi;
    while (trailing_begin > lo && IsPunct(cps[trailing_begin - 1].value)) {
      --trailing_begin;
    }
    if (lo < trailing_begin) emit(cps[lo].start, cps[trailing_begin - 1].end);
    for (size_t k = trailing_begin; k < hi; ++k) emit(cps[k].start, cps[k].end);
    i = chunk_end;
  }
  return tokens;
}

RawDocument MakeDocument(
    std::string doc_id, std::string_view raw,
    std::vector<std::pair<size_t, std::pair<std::string, std::string>>> note_headers) {
  std::sort(note_headers.begin(), note_headers.end(),
            [](const auto &a, const auto &b) { return a.first < b.first; });
  std::vector<size_t> cuts{0};
  for (size_t i = 0; i < note_headers.size(); ++i) {
    size_t offset = note_headers[i].first;
    if (offset > raw.size()) {
      throw DataError("note offset " + std::to_string(offset) +
                      " beyond end of document " + doc_id);
    }
    if (i > 0 && offset == note_headers[i - 1].first) {
      throw DataError("duplicate note offset " + std::to_string(offset) +
                      " in document " + doc_id);
    }
    if (offset != cuts.back()) cuts.push_back(offset);
  }
  if (cuts.back() != raw.size() || cuts.size() == 1) cuts.push_back(raw.size());
  auto [text, remapped] = NormalizePieces(raw, cuts);

  RawDocument doc;
  doc.doc_id = std::move(doc_id);
  doc.text = std::move(text);
  for (size_t i = 0; i < note_headers.size(); ++i) {
    auto cut_index = [&](size_t raw_offset) {
      return static_cast<size_t>(
          std::lower_bound(cuts.begin(), cuts.end(), raw_offset) - cuts.begin());
    };
    size_t begin = remapped[cut_index(note_headers[i].first)];
    size_t end = i + 1 < note_headers.size()
                     ? remapped[cut_index(note_headers[i + 1].first)]
                     : doc.text.size();
    doc.notes.push_back(Note{note_headers[i].second.first,
                             note_headers[i].second.second, Span{begin, end}});
  }
  return doc;
}

RawDocument ReadDocument(const std::string &path,
                         const std::optional<std::string> &sidecar,
                         const std::string &doc_id) {
  std::string raw = ReadFile(path);
  std::vector<std::pair<size_t, std::pair<std::string, std::string>>> headers;
  if (sidecar) {
    std::istringstream in(ReadFile(*sidecar));
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (Trim(line).empty()) continue;
      std::vector<std::string> fields;
      std::istringstream row(line);
      std::string field;
      while (std::getline(row, field, '\t')) fields.push_back(field);
      if (fields.size() == 2) fields.emplace_back();
      if (fields.size() != 3) {
        throw ParseError(*sidecar, line_no, "expected offset\\tdate\\tcontext");
      }
      size_t offset = 0;
      try {
        size_t used = 0;
        offset = std::stoul(fields[0], &used);
        if (used != fields[0].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception &) {
        throw ParseError(*sidecar, line_no, "bad offset '" + fields[0] + "'");
      }
      headers.push_back({offset, {fields[1], fields[2]}});
    }
  }
  std::string id = doc_id.empty() ? std::filesystem::path(path).stem().string() : doc_id;
  return MakeDocument(std::move(id), raw, std::move(headers));
}

std::vector<Sentence> segment(const RawDocument &doc) {
  std::vector<Sentence> out;
  if (doc.notes.empty()) {
    SegmentBody(doc, Span{0, doc.text.size()}, out);
  } else {
    for (const Note &note : doc.notes) SegmentBody(doc, note.body, out);
  }
  return out;
}

std::vector<Sentence> dedupe(std::vector<Sentence> sentences) {
  std::unordered_set<std::string> seen;
  std::vector<Sentence> out;
  out.reserve(sentences.size());
  for (auto &s : sentences) {
    if (seen.insert(CollapseWhitespace(s.text)).second) out.push_back(std::move(s));
  }
  return out;
}

void Glossary::Add(std::string_view abbreviation, std::string_view expansion) {
  std::string key = Nfkc(Trim(abbreviation));
  std::string value = Nfkc(Trim(expansion));
  if (key.empty()) throw DataError("empty glossary key");
  if (value.empty()) throw DataError("empty expansion for '" + key + "'");
  auto tokens = Tokenize(key);
  if (tokens.size() != 1 || tokens[0].text != key) {
    throw DataError("glossary key '" + key + "' is not a single token");
  }
  if (key == value) throw DataError("glossary key '" + key + "' equals its expansion");
  size_t pos = 0;
  while (pos < value.size()) {
    if (IsTerminal(NextCodePoint(value, pos))) {
      throw DataError("expansion of '" + key + "' contains a sentence terminator");
    }
  }
  entries_[key] = value;
}

Glossary Glossary::Parse(std::istream &in, const std::string &source) {
  Glossary g;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError(source, line_no, "expected ABBREV\\texpansion");
    }
    try {
      g.Add(std::string_view(line).substr(0, tab),
            std::string_view(line).substr(tab + 1));
    } catch (const ParseError &) {
      throw;
    } catch (const DataError &e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  return g;
}

Glossary Glossary::Load(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return Parse(in, path);
}

const std::string *Glossary::Find(std::string_view token) const {
  auto it = entries_.find(token);
  return it == entries_.end() ? nullptr : &it->second;
}

Span NormalizedSentence::ToOriginal(Span normalized) const {
  if (normalized.empty() || normalized.end > text.size()) {
    throw std::out_of_range("span outside normalized sentence");
  }
  return Span{offset_map[normalized.start], end_map[normalized.end - 1]};
}

NormalizedSentence expand_abbreviations(std::string_view sentence,
                                        const Glossary &glossary) {
  NormalizedSentence out;
  out.original = std::string(sentence);
  out.text.reserve(sentence.size());
  auto copy_identity = [&](size_t from, size_t to) {
    for (size_t i = from; i < to; ++i) {
      out.text.push_back(sentence[i]);
      out.offset_map.push_back(i);
      out.end_map.push_back(i + 1);
    }
  };
  size_t cursor = 0;
  if (!glossary.empty()) {
    for (const Token &tok : Tokenize(sentence)) {
      const std::string *expansion = glossary.Find(tok.text);
      if (expansion == nullptr) continue;
      copy_identity(cursor, tok.span.start);
      out.text += *expansion;
      out.offset_map.insert(out.offset_map.end(), expansion->size(), tok.span.start);
      out.end_map.insert(out.end_map.end(), expansion->size(), tok.span.end);
      cursor = tok.span.end;
    }
  }
  copy_identity(cursor, sentence.size());
  return out;
}

}  // namespace clinex
