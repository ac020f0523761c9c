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

#include "clinex/kb.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>

#include "clinex/error.h"
#include "clinex/unicode.h"

namespace clinex {

namespace {

bool MatchesCode(std::string_view s, char prefix, size_t digits) {
  if (s.size() != digits + 1 || s[0] != prefix) return false;
  return std::all_of(s.begin() + 1, s.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::ifstream OpenOrThrow(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

}  // namespace

std::string_view ClassName(EntityClass c) {
  switch (c) {
    case EntityClass::kProcedure: return "Procedure";
    case EntityClass::kDrug: return "Drug";
    case EntityClass::kDisease: return "Disease";
  }
  return "?";
}

std::string_view ClassSlug(EntityClass c) {
  switch (c) {
    case EntityClass::kProcedure: return "procedure";
    case EntityClass::kDrug: return "drug";
    case EntityClass::kDisease: return "disease";
  }
  return "?";
}

std::optional<EntityClass> ParseClass(std::string_view name) {
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(
      static_cast<unsigned char>(c))));
  if (!lower.empty() && lower.back() == 's') lower.pop_back();
  for (EntityClass c : kEntityClasses) {
    if (lower == ClassSlug(c)) return c;
  }
  return std::nullopt;
}

int ClassPriority(EntityClass c) {
  switch (c) {
    case EntityClass::kDisease: return 0;
    case EntityClass::kProcedure: return 1;
    case EntityClass::kDrug: return 2;
  }
  return 3;
}

bool IsValidCui(std::string_view cui) { return MatchesCode(cui, 'C', 7); }
bool IsValidTui(std::string_view tui) { return MatchesCode(tui, 'T', 3); }

SemanticGroupMap SemanticGroupMap::Default() {
  SemanticGroupMap map;
  for (const char *tui : {"T058", "T059", "T060", "T061"}) {
    map.Add(tui, EntityClass::kProcedure);
  }
  for (const char *tui : {"T121", "T122", "T195", "T200"}) {
    map.Add(tui, EntityClass::kDrug);
  }
  for (const char *tui : {"T019", "T020", "T033", "T037", "T046", "T047",
                          "T048", "T049", "T050", "T184", "T190", "T191"}) {
    map.Add(tui, EntityClass::kDisease);
  }
  return map;
}

void SemanticGroupMap::Add(const std::string &tui, EntityClass c) {
  if (!IsValidTui(tui)) throw DataError("malformed TUI '" + tui + "'");
  auto [it, inserted] = map_.emplace(tui, c);
  if (!inserted && it->second != c) {
    throw DataError("TUI " + tui + " mapped to both " +
                    std::string(ClassName(it->second)) + " and " +
                    std::string(ClassName(c)));
  }
}

SemanticGroupMap SemanticGroupMap::Parse(std::istream &in,
                                         const std::string &source) {
  SemanticGroupMap map;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty() || line[0] == '#') continue;
    auto fields = SplitTabs(line);
    if (fields.size() != 2) {
      throw ParseError(source, line_no, "expected 2 tab-separated columns");
    }
    auto c = ParseClass(Trim(fields[1]));
    if (!c) {
      throw ParseError(source, line_no,
                       "unknown class '" + std::string(fields[1]) + "'");
    }
    try {
      map.Add(std::string(fields[0]), *c);
    } catch (const DataError &e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  return map;
}

SemanticGroupMap SemanticGroupMap::Load(const std::string &path) {
  auto in = OpenOrThrow(path);
  return Parse(in, path);
}

std::optional<EntityClass> SemanticGroupMap::ClassOf(std::string_view tui) const {
  auto it = map_.find(tui);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

std::set<std::string> SemanticGroupMap::RelevantTuis(EntityClass c) const {
  std::set<std::string> out;
  for (const auto &[tui, cls] : map_) {
    if (cls == c) out.insert(tui);
  }
  return out;
}

std::set<std::string> SemanticGroupMap::AllTuis() const {
  std::set<std::string> out;
  for (const auto &entry : map_) out.insert(entry.first);
  return out;
}

std::optional<EntityClass> class_of(std::string_view tui,
                                    const SemanticGroupMap &map) {
  return map.ClassOf(tui);
}

std::set<std::string> relevant_tuis(EntityClass c, const SemanticGroupMap &map) {
  return map.RelevantTuis(c);
}

void KnowledgeBase::Merge(Concept c) {
  auto it = by_cui_.find(c.cui);
  if (it == by_cui_.end()) {
    by_cui_.emplace(c.cui, concepts_.size());
    // Collapse duplicate terms inside the incoming concept as well.
    Concept fresh{c.cui, {}, std::move(c.tuis)};
    for (auto &t : c.terms) {
      if (std::find(fresh.terms.begin(), fresh.terms.end(), t) ==
          fresh.terms.end()) {
        fresh.terms.push_back(std::move(t));
      }
    }
    concepts_.push_back(std::move(fresh));
    return;
  }
  Concept &existing = concepts_[it->second];
  for (auto &t : c.terms) {
    if (std::find(existing.terms.begin(), existing.terms.end(), t) ==
        existing.terms.end()) {
      existing.terms.push_back(std::move(t));
    }
  }
  existing.tuis.insert(c.tuis.begin(), c.tuis.end());
}

KnowledgeBase KnowledgeBase::FromConcepts(std::vector<Concept> concepts) {
  KnowledgeBase kb;
  for (auto &c : concepts) {
    if (c.terms.empty() || c.tuis.empty()) {
      throw DataError("concept " + c.cui + " has no terms or no TUIs");
    }
    kb.Merge(std::move(c));
  }
  return kb;
}

const Concept *KnowledgeBase::Find(std::string_view cui) const {
  auto it = by_cui_.find(std::string(cui));
  return it == by_cui_.end() ? nullptr : &concepts_[it->second];
}

KnowledgeBase ParseKb(std::istream &in, const std::string &source,
                      const KbLoadOptions &options) {
  KnowledgeBase kb;
  std::string line;
  size_t line_no = 0;
  size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = SplitTabs(line);
    if (fields.size() != 4) {
      throw ParseError(source, line_no,
                       "expected 4 tab-separated columns, found " +
                           std::to_string(fields.size()));
    }
    std::string_view cui = fields[0];
    std::string_view tui = fields[3];
    if (!IsValidCui(cui)) {
      throw ParseError(source, line_no, "malformed CUI '" + std::string(cui) + "'");
    }
    if (!IsValidTui(tui)) {
      throw ParseError(source, line_no, "malformed TUI '" + std::string(tui) + "'");
    }
    std::string term = Nfkc(Trim(fields[1]));
    if (term.empty()) throw ParseError(source, line_no, "empty term");
    ++rows;
    std::string language(fields[2]);
    if (!options.language.empty() && language != options.language) continue;
    kb.Merge(Concept{std::string(cui), {Term{std::move(term), std::move(language)}},
                     {std::string(tui)}});
  }
  if (rows == 0) throw DataError(source + ": empty knowledge base file");
  return kb;
}

KnowledgeBase load_kb(const std::string &path, const KbLoadOptions &options) {
  auto in = OpenOrThrow(path);
  return ParseKb(in, path, options);
}

void WriteKb(const KnowledgeBase &kb, std::ostream &out) {
  for (const Concept &c : kb.concepts()) {
    for (const Term &t : c.terms) {
      for (const std::string &tui : c.tuis) {
        out << c.cui << '\t' << t.text << '\t' << t.language << '\t' << tui
            << '\n';
      }
    }
  }
}

}  // namespace clinex
