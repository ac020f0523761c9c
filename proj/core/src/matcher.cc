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

#include "clinex/matcher.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "clinex/unicode.h"

namespace clinex {

namespace {

// Slack applied to every pruning bound so that rounding in the bound
// computation can never exclude a term the exact check would accept.
constexpr double kBoundSlack = 1e-9;

size_t CeilBound(double x) {
  double c = std::ceil(x - kBoundSlack);
  return c < 0 ? 0 : static_cast<size_t>(c);
}

size_t FloorBound(double x) {
  double f = std::floor(x + kBoundSlack);
  return f < 0 ? 0 : static_cast<size_t>(f);
}

// Admissible candidate sizes [lo, hi] for a query of size x.
std::pair<size_t, size_t> SizeRange(Similarity m, size_t x, double alpha,
                                    size_t max_size) {
  double dx = static_cast<double>(x);
  size_t lo = 1;
  size_t hi = max_size;
  switch (m) {
    case Similarity::kJaccard:
      lo = CeilBound(alpha * dx);
      hi = FloorBound(dx / alpha);
      break;
    case Similarity::kCosine:
      lo = CeilBound(alpha * alpha * dx);
      hi = FloorBound(dx / (alpha * alpha));
      break;
    case Similarity::kDice:
      lo = CeilBound(alpha * dx / (2.0 - alpha));
      hi = FloorBound((2.0 - alpha) * dx / alpha);
      break;
    case Similarity::kOverlap:
      break;
  }
  return {std::max<size_t>(lo, 1), std::min(hi, max_size)};
}

// Minimum intersection size for a candidate of size y.
size_t MinOverlap(Similarity m, size_t x, size_t y, double alpha) {
  double dx = static_cast<double>(x);
  double dy = static_cast<double>(y);
  double bound = 0.0;
  switch (m) {
    case Similarity::kJaccard: bound = alpha * (dx + dy) / (1.0 + alpha); break;
    case Similarity::kCosine: bound = alpha * std::sqrt(dx * dy); break;
    case Similarity::kDice: bound = alpha * (dx + dy) / 2.0; break;
    case Similarity::kOverlap: bound = alpha * std::min(dx, dy); break;
  }
  return std::max<size_t>(CeilBound(bound), 1);
}

// Drops punctuation tokens at both edges and folds what remains.
std::string NormalizeTerm(std::string_view text) {
  auto tokens = Tokenize(text);
  size_t a = 0;
  size_t b = tokens.size();
  while (a < b && IsPunctuation(tokens[a].text)) ++a;
  while (b > a && IsPunctuation(tokens[b - 1].text)) --b;
  if (a == b) return "";
  size_t start = tokens[a].span.start;
  return Fold(text.substr(start, tokens[b - 1].span.end - start));
}

bool HitLess(const LookupHit &a, const LookupHit &b) {
  return std::tie(b.score, a.term, a.cui) < std::tie(a.score, b.term, b.cui);
}

std::vector<std::string> FilterTuis(const std::vector<std::string> &tuis,
                                    const std::optional<std::set<std::string>> &filter) {
  if (!filter) return tuis;
  std::vector<std::string> kept;
  for (const auto &t : tuis) {
    if (filter->count(t)) kept.push_back(t);
  }
  return kept;
}

}  // namespace

std::string_view SimilarityName(Similarity m) {
  switch (m) {
    case Similarity::kJaccard: return "jaccard";
    case Similarity::kCosine: return "cosine";
    case Similarity::kDice: return "dice";
    case Similarity::kOverlap: return "overlap";
  }
  return "?";
}

std::optional<Similarity> ParseSimilarity(std::string_view name) {
  for (Similarity m : {Similarity::kJaccard, Similarity::kCosine, Similarity::kDice,
                       Similarity::kOverlap}) {
    if (name == SimilarityName(m)) return m;
  }
  return std::nullopt;
}

std::string_view OverlapName(OverlapCriterion c) {
  return c == OverlapCriterion::kScore ? "score" : "length";
}

std::optional<OverlapCriterion> ParseOverlap(std::string_view name) {
  if (name == "score") return OverlapCriterion::kScore;
  if (name == "length") return OverlapCriterion::kLength;
  return std::nullopt;
}

void MatcherConfig::Validate() const {
  if (n < 1) throw std::invalid_argument("matcher n must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("matcher alpha must be in (0, 1]");
  }
  if (max_window < 1) throw std::invalid_argument("matcher max_window must be >= 1");
}

NGramSet ngrams(std::string_view s, int n) {
  if (n < 1) throw std::invalid_argument("n-gram size must be >= 1");
  if (s.empty()) return {};
  std::vector<std::string> cps;
  cps.reserve(s.size() + 2 * (n - 1));
  for (int i = 0; i < n - 1; ++i) cps.emplace_back("#");
  for (auto &cp : CodePoints(s)) cps.push_back(std::move(cp));
  for (int i = 0; i < n - 1; ++i) cps.emplace_back("#");
  NGramSet out;
  for (size_t i = 0; i + n <= cps.size(); ++i) {
    std::string gram;
    for (int k = 0; k < n; ++k) gram += cps[i + k];
    out.push_back(std::move(gram));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double SimilarityScore(Similarity m, size_t overlap, size_t a_size, size_t b_size) {
  if (a_size == 0 && b_size == 0) return 1.0;
  if (a_size == 0 || b_size == 0) return 0.0;
  double o = static_cast<double>(overlap);
  double a = static_cast<double>(a_size);
  double b = static_cast<double>(b_size);
  switch (m) {
    case Similarity::kJaccard: return o / (a + b - o);
    case Similarity::kCosine: return o / std::sqrt(a * b);
    case Similarity::kDice: return 2.0 * o / (a + b);
    case Similarity::kOverlap: return o / std::min(a, b);
  }
  return 0.0;
}

double similarity(const NGramSet &a, const NGramSet &b, Similarity m) {
  size_t overlap = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++overlap;
      ++ia;
      ++ib;
    }
  }
  return SimilarityScore(m, overlap, a.size(), b.size());
}

const std::vector<NGramIndex::Posting> &NGramIndex::postings(std::string_view gram) const {
  static const std::vector<Posting> kEmpty;
  auto it = gram_ids_.find(std::string(gram));
  return it == gram_ids_.end() ? kEmpty : postings_[it->second];
}

std::vector<LookupHit> NGramIndex::Search(std::string_view folded_query,
                                          Similarity measure, double alpha) const {
  std::vector<LookupHit> hits;
  NGramSet query = ngrams(folded_query, n_);
  if (query.empty() || entries_.empty()) return hits;
  const size_t x = query.size();

  std::vector<uint32_t> known;
  for (const auto &g : query) {
    auto it = gram_ids_.find(g);
    if (it != gram_ids_.end()) known.push_back(it->second);
  }
  if (known.empty()) return hits;

  auto [lo, hi] = SizeRange(measure, x, alpha, max_size_);
  using Range = std::pair<const Posting *, const Posting *>;
  std::vector<Range> lists;
  std::vector<std::pair<uint32_t, uint32_t>> candidates;  // (term, count)
  std::vector<std::pair<uint32_t, uint32_t>> merged;

  for (size_t y = lo; y <= hi; ++y) {
    const size_t tau = MinOverlap(measure, x, y, alpha);
    if (tau > known.size() || tau > y) continue;

    lists.clear();
    for (uint32_t g : known) {
      const auto &plist = postings_[g];
      auto first = std::lower_bound(plist.begin(), plist.end(),
                                    Posting{static_cast<uint32_t>(y), 0});
      auto last = std::lower_bound(first, plist.end(),
                                   Posting{static_cast<uint32_t>(y + 1), 0});
      lists.emplace_back(plist.data() + (first - plist.begin()),
                         plist.data() + (last - plist.begin()));
    }
    std::sort(lists.begin(), lists.end(), [](const Range &a, const Range &b) {
      return (a.second - a.first) < (b.second - b.first);
    });

    // Signature lists: any term reaching tau must occur in one of these.
    const size_t signature = lists.size() - tau + 1;
    candidates.clear();
    for (size_t i = 0; i < signature; ++i) {
      merged.clear();
      auto ic = candidates.begin();
      for (const Posting *p = lists[i].first; p != lists[i].second; ++p) {
        while (ic != candidates.end() && ic->first < p->term) merged.push_back(*ic++);
        if (ic != candidates.end() && ic->first == p->term) {
          merged.emplace_back(p->term, ic->second + 1);
          ++ic;
        } else {
          merged.emplace_back(p->term, 1);
        }
      }
      merged.insert(merged.end(), ic, candidates.end());
      candidates.swap(merged);
    }

    // Probe the remaining lists, pruning terms that can no longer reach tau.
    for (size_t i = signature; i < lists.size() && !candidates.empty(); ++i) {
      const size_t remaining_after = lists.size() - i - 1;
      merged.clear();
      for (auto [term, count] : candidates) {
        if (std::binary_search(lists[i].first, lists[i].second,
                               Posting{static_cast<uint32_t>(y), term})) {
          ++count;
        }
        if (count + remaining_after >= tau) merged.emplace_back(term, count);
      }
      candidates.swap(merged);
    }

    for (auto [term, count] : candidates) {
      if (count < tau) continue;
      double score = SimilarityScore(measure, count, x, y);
      if (score < alpha) continue;
      const Entry &e = entries_[term];
      hits.push_back(LookupHit{e.term, e.cui, e.tuis, score});
    }
  }
  std::sort(hits.begin(), hits.end(), HitLess);
  return hits;
}

NGramIndex build_index(const KnowledgeBase &kb, const MatcherConfig &cfg) {
  cfg.Validate();
  NGramIndex index;
  index.n_ = cfg.n;
  std::set<std::pair<std::string, std::string>> seen;
  for (const Concept &c : kb.concepts()) {
    std::vector<std::string> tuis = FilterTuis(
        std::vector<std::string>(c.tuis.begin(), c.tuis.end()), cfg.tui_filter);
    if (tuis.empty()) continue;
    for (const Term &t : c.terms) {
      std::string folded = NormalizeTerm(t.text);
      if (folded.empty() || !seen.emplace(folded, c.cui).second) continue;
      NGramIndex::Entry entry{folded, {}, c.cui, tuis};
      for (const auto &g : ngrams(folded, cfg.n)) {
        auto [it, inserted] =
            index.gram_ids_.emplace(g, static_cast<uint32_t>(index.gram_strings_.size()));
        if (inserted) {
          index.gram_strings_.push_back(g);
          index.postings_.emplace_back();
        }
        entry.grams.push_back(it->second);
      }
      std::sort(entry.grams.begin(), entry.grams.end());
      const auto term_id = static_cast<uint32_t>(index.entries_.size());
      const auto size = static_cast<uint32_t>(entry.grams.size());
      for (uint32_t g : entry.grams) index.postings_[g].push_back({size, term_id});
      index.max_size_ = std::max(index.max_size_, size);
      index.entries_.push_back(std::move(entry));
    }
  }
  for (auto &plist : index.postings_) std::sort(plist.begin(), plist.end());
  return index;
}

std::vector<LookupHit> lookup(const NGramIndex &index, std::string_view query,
                              const MatcherConfig &cfg) {
  cfg.Validate();
  if (cfg.n != index.n()) {
    throw std::invalid_argument("index built with n=" + std::to_string(index.n()) +
                                ", query uses n=" + std::to_string(cfg.n));
  }
  std::vector<LookupHit> hits = index.Search(NormalizeTerm(query), cfg.measure, cfg.alpha);
  if (!cfg.tui_filter) return hits;
  std::vector<LookupHit> kept;
  for (auto &h : hits) {
    h.tuis = FilterTuis(h.tuis, cfg.tui_filter);
    if (!h.tuis.empty()) kept.push_back(std::move(h));
  }
  return kept;
}

std::vector<Match> scan_sentence(const NormalizedSentence &s, const NGramIndex &index,
                                 const MatcherConfig &cfg) {
  cfg.Validate();
  const std::vector<Token> tokens = Tokenize(s.text);
  std::vector<bool> punct(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) punct[i] = IsPunctuation(tokens[i].text);

  struct Candidate {
    Match match;
    bool verbatim = false;  // the window itself is a KB term
  };
  std::vector<Candidate> candidates;
  const size_t window = static_cast<size_t>(cfg.max_window);
  for (size_t a = 0; a < tokens.size(); ++a) {
    if (punct[a]) continue;
    for (size_t b = a + 1; b <= tokens.size() && b - a <= window; ++b) {
      if (punct[b - 1]) continue;
      Span normalized{tokens[a].span.start, tokens[b - 1].span.end};
      std::string_view text =
          std::string_view(s.text).substr(normalized.start, normalized.length());
      auto hits = lookup(index, text, cfg);
      if (hits.empty()) continue;
      const std::string folded = NormalizeTerm(text);
      auto best = std::find_if(hits.begin(), hits.end(), [&](const LookupHit &h) {
        return h.score == hits.front().score && h.term == folded;
      });
      const bool verbatim = best != hits.end();
      if (!verbatim) best = hits.begin();
      Span original = s.ToOriginal(normalized);
      candidates.push_back({Match{original, s.original.substr(original.start, original.length()),
                                  std::move(best->term), std::move(best->cui),
                                  std::move(best->tuis), best->score, b - a},
                            verbatim});
    }
  }

  // Under asymmetric measures a long window can tie a verbatim term at 1.0,
  // so the verbatim window wins ties on score.
  if (cfg.overlap == OverlapCriterion::kScore) {
    std::sort(candidates.begin(), candidates.end(), [](const Candidate &p, const Candidate &q) {
      const Match &x = p.match;
      const Match &y = q.match;
      return std::tie(y.score, q.verbatim, y.window_tokens, x.span, x.matched_term, x.cui) <
             std::tie(x.score, p.verbatim, x.window_tokens, y.span, y.matched_term, y.cui);
    });
  } else {
    std::sort(candidates.begin(), candidates.end(), [](const Candidate &p, const Candidate &q) {
      const Match &x = p.match;
      const Match &y = q.match;
      return std::tie(y.window_tokens, y.score, x.span, x.matched_term, x.cui) <
             std::tie(x.window_tokens, x.score, y.span, y.matched_term, y.cui);
    });
  }
  std::vector<Match> selected;
  for (auto &[m, verbatim] : candidates) {
    bool clash = std::any_of(selected.begin(), selected.end(),
                             [&](const Match &k) { return k.span.Overlaps(m.span); });
    if (!clash) selected.push_back(std::move(m));
  }
  std::sort(selected.begin(), selected.end(),
            [](const Match &x, const Match &y) { return x.span < y.span; });
  return selected;
}

}  // namespace clinex
