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

// Approximate dictionary matching over character n-grams.
//
// Terms are indexed by their padded character n-gram sets. A query retrieves
// every term whose set similarity to the query is at least alpha. Candidate
// generation follows CPMerge: for each admissible candidate set size the
// minimum overlap tau is derived from the measure, the rarest
// |X| - tau + 1 posting lists produce candidates, and the remaining lists are
// probed by binary search. Survivors are verified with the exact similarity,
// so pruning only affects speed.

#ifndef CLINEX_MATCHER_H_
#define CLINEX_MATCHER_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clinex/kb.h"
#include "clinex/textprep.h"

namespace clinex {

enum class Similarity { kJaccard, kCosine, kDice, kOverlap };

std::string_view SimilarityName(Similarity m);
std::optional<Similarity> ParseSimilarity(std::string_view name);

// Order used to resolve overlapping matches in scan_sentence.
//   kScore:  higher score, then windows that are themselves a KB term, then
//            more tokens, then smaller start.
//   kLength: more tokens, then higher score, then smaller start.
enum class OverlapCriterion { kScore, kLength };

std::string_view OverlapName(OverlapCriterion c);
std::optional<OverlapCriterion> ParseOverlap(std::string_view name);

struct MatcherConfig {
  int n = 3;
  Similarity measure = Similarity::kJaccard;
  double alpha = 0.7;
  int max_window = 7;
  OverlapCriterion overlap = OverlapCriterion::kScore;
  // When set, only concepts carrying one of these TUIs are reported.
  std::optional<std::set<std::string>> tui_filter;

  // Throws std::invalid_argument when a field is out of range.
  void Validate() const;
};

// Sorted, duplicate-free set of n-grams.
using NGramSet = std::vector<std::string>;

// Code point n-grams of s padded with n-1 '#' on both sides.
NGramSet ngrams(std::string_view s, int n);

// Score from set sizes and intersection size.
double SimilarityScore(Similarity m, size_t overlap, size_t a_size, size_t b_size);

// Set similarity of two sorted n-gram sets. Two empty sets score 1.
double similarity(const NGramSet &a, const NGramSet &b, Similarity m);

struct LookupHit {
  std::string term;
  std::string cui;
  std::vector<std::string> tuis;
  double score = 0.0;

  bool operator==(const LookupHit &) const = default;
};

// Immutable inverted index from n-gram to (term id, term set size).
class NGramIndex {
 public:
  struct Entry {
    std::string term;            // folded term
    std::vector<uint32_t> grams;  // sorted gram ids
    std::string cui;
    std::vector<std::string> tuis;
  };

  struct Posting {
    uint32_t size;
    uint32_t term;
    auto operator<=>(const Posting &) const = default;
  };

  NGramIndex() = default;

  int n() const { return n_; }
  size_t size() const { return entries_.size(); }
  size_t num_grams() const { return gram_ids_.size(); }
  const std::vector<Entry> &entries() const { return entries_; }

  // Posting list of an n-gram string; empty if unknown.
  const std::vector<Posting> &postings(std::string_view gram) const;

  // All n-gram strings, in id order.
  const std::vector<std::string> &grams() const { return gram_strings_; }

  // Exact-threshold retrieval over already folded query text.
  std::vector<LookupHit> Search(std::string_view folded_query,
                                Similarity measure, double alpha) const;

 private:
  friend NGramIndex build_index(const KnowledgeBase &kb, const MatcherConfig &cfg);

  int n_ = 3;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, uint32_t> gram_ids_;
  std::vector<std::string> gram_strings_;
  std::vector<std::vector<Posting>> postings_;
  uint32_t max_size_ = 0;
};

// Indexes every (folded term, CUI) pair of the knowledge base. With a TUI
// filter, concepts without a listed TUI are left out and the stored TUIs are
// restricted to the filter.
NGramIndex build_index(const KnowledgeBase &kb, const MatcherConfig &cfg);

// Terms whose similarity to Fold(query) is >= cfg.alpha, score-descending
// with ties ordered by term then CUI. Throws std::invalid_argument if the
// index was built with a different n.
std::vector<LookupHit> lookup(const NGramIndex &index, std::string_view query,
                              const MatcherConfig &cfg);

struct Match {
  Span span;  // byte offsets into the original sentence
  std::string window_text;
  std::string matched_term;
  std::string cui;
  std::vector<std::string> tuis;
  double score = 0.0;
  size_t window_tokens = 0;

  bool operator==(const Match &) const = default;
};

// Queries every token window of 1..max_window tokens (after stripping
// punctuation tokens at the window edges), keeps the best hit of each window
// and resolves overlaps by cfg.overlap.
// Output is non-overlapping and sorted by start.
std::vector<Match> scan_sentence(const NormalizedSentence &s, const NGramIndex &index,
                                 const MatcherConfig &cfg);

}  // namespace clinex

#endif  // CLINEX_MATCHER_H_
