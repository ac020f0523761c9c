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

// Concept knowledge base and the semantic-type to entity-class grouping.
//
// The knowledge base is read from a four column TSV subset of a UMLS-style
// metathesaurus: CUI, term, language, TUI. A concept with k terms and m
// semantic types occupies k*m rows.

#ifndef CLINEX_KB_H_
#define CLINEX_KB_H_

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace clinex {

enum class EntityClass { kProcedure = 0, kDrug = 1, kDisease = 2 };

inline constexpr std::array<EntityClass, 3> kEntityClasses = {
    EntityClass::kProcedure, EntityClass::kDrug, EntityClass::kDisease};

// "Procedure", "Drug", "Disease".
std::string_view ClassName(EntityClass c);

// Lowercase file stem used for per-class artifacts: "procedure", ...
std::string_view ClassSlug(EntityClass c);

// Accepts the class name or slug, case-insensitively, singular or plural.
std::optional<EntityClass> ParseClass(std::string_view name);

// Fixed priority used whenever one concept maps to several classes and no
// other rule decides: Disease > Procedure > Drug. Lower value wins.
int ClassPriority(EntityClass c);

bool IsValidCui(std::string_view cui);
bool IsValidTui(std::string_view tui);

struct Term {
  std::string text;
  std::string language;

  bool operator==(const Term &) const = default;
};

struct Concept {
  std::string cui;
  std::vector<Term> terms;
  std::set<std::string> tuis;

  bool operator==(const Concept &) const = default;
};

// Semantic type (TUI) to entity class mapping.
class SemanticGroupMap {
 public:
  SemanticGroupMap() = default;

  // The twenty-TUI grouping used for procedures, drugs and diseases.
  static SemanticGroupMap Default();

  // Reads rows "TUI\tClassName". A TUI listed twice with different classes is
  // an error.
  static SemanticGroupMap Load(const std::string &path);
  static SemanticGroupMap Parse(std::istream &in, const std::string &source);

  // Adds a mapping. Throws DataError when the TUI is malformed or already
  // mapped to another class.
  void Add(const std::string &tui, EntityClass c);

  std::optional<EntityClass> ClassOf(std::string_view tui) const;
  std::set<std::string> RelevantTuis(EntityClass c) const;
  std::set<std::string> AllTuis() const;

  size_t size() const { return map_.size(); }
  bool empty() const { return map_.empty(); }
  const std::map<std::string, EntityClass, std::less<>> &entries() const {
    return map_;
  }

  bool operator==(const SemanticGroupMap &) const = default;

 private:
  std::map<std::string, EntityClass, std::less<>> map_;
};

std::optional<EntityClass> class_of(std::string_view tui,
                                    const SemanticGroupMap &map);
std::set<std::string> relevant_tuis(EntityClass c, const SemanticGroupMap &map);

struct KbLoadOptions {
  // Rows whose language column differs are skipped. Empty accepts all.
  std::string language = "POR";
};

// Immutable after load; safe for concurrent readers.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;

  // Builds from concepts, merging entries that share a CUI.
  static KnowledgeBase FromConcepts(std::vector<Concept> concepts);

  const std::vector<Concept> &concepts() const { return concepts_; }
  const Concept *Find(std::string_view cui) const;
  size_t size() const { return concepts_.size(); }
  bool empty() const { return concepts_.empty(); }

  bool operator==(const KnowledgeBase &other) const {
    return concepts_ == other.concepts_;
  }

 private:
  friend KnowledgeBase ParseKb(std::istream &, const std::string &,
                               const KbLoadOptions &);
  void Merge(Concept c);

  std::vector<Concept> concepts_;
  std::unordered_map<std::string, size_t> by_cui_;
};

KnowledgeBase load_kb(const std::string &path, const KbLoadOptions &options = {});
KnowledgeBase ParseKb(std::istream &in, const std::string &source,
                      const KbLoadOptions &options = {});

// Writes the concepts back out in the TSV format (k*m rows per concept).
void WriteKb(const KnowledgeBase &kb, std::ostream &out);

}  // namespace clinex

#endif  // CLINEX_KB_H_
