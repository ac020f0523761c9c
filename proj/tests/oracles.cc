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

#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include "clinex/unicode.h"

namespace clinex::oracle {

namespace {

const std::vector<std::string> kAlphabet = {"a", "b", "c", "d", "e", "f", "g",
                                            "h", "i", "j", "é", "ç", "ã"};

std::string RandomWord(Rng &rng, size_t min_len, size_t max_len) {
  std::uniform_int_distribution<size_t> len(min_len, max_len);
  std::uniform_int_distribution<size_t> ch(0, kAlphabet.size() - 1);
  std::string w;
  for (size_t i = len(rng); i > 0; --i) w += kAlphabet[ch(rng)];
  return w;
}

double LogSumExp(const std::vector<double> &v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

std::vector<std::string> Grams(const std::string &s, int n) {
  if (s.empty()) return {};
  std::vector<std::string> cps(n - 1, "#");
  for (auto &cp : CodePoints(s)) cps.push_back(cp);
  for (int i = 0; i < n - 1; ++i) cps.push_back("#");
  std::set<std::string> out;
  for (size_t i = 0; i + n <= cps.size(); ++i) {
    std::string g;
    for (int k = 0; k < n; ++k) g += cps[i + k];
    out.insert(g);
  }
  return {out.begin(), out.end()};
}

double Score(Similarity m, const std::vector<std::string> &a,
             const std::vector<std::string> &b) {
  std::set<std::string> sa(a.begin(), a.end());
  double inter = 0;
  for (const auto &g : b) inter += sa.count(g);
  return ScoreFromCounts(m, inter, static_cast<double>(a.size()),
                         static_cast<double>(b.size()));
}

double ScoreFromCounts(Similarity m, double inter, double x, double y) {
  if (x == 0 && y == 0) return 1.0;
  if (x == 0 || y == 0) return 0.0;
  switch (m) {
    case Similarity::kJaccard: return inter / (x + y - inter);
    case Similarity::kCosine: return inter / std::sqrt(x * y);
    case Similarity::kDice: return 2.0 * inter / (x + y);
    case Similarity::kOverlap: return inter / std::min(x, y);
  }
  return 0.0;
}

std::vector<DictTerm> RandomDictionary(Rng &rng, size_t terms) {
  static const std::vector<std::string> tuis = {"T047", "T121", "T061", "T191"};
  std::uniform_int_distribution<int> words(1, 3);
  std::uniform_int_distribution<size_t> tui(0, tuis.size() - 1);
  std::bernoulli_distribution share(0.2);
  std::vector<DictTerm> dict;
  for (size_t i = 0; i < terms; ++i) {
    std::string text;
    for (int w = words(rng); w > 0; --w) {
      if (!text.empty()) text += ' ';
      text += RandomWord(rng, 2, 7);
    }
    DictTerm t;
    t.text = text;
    // Some concepts get a second term.
    if (!dict.empty() && share(rng)) {
      t.cui = dict.back().cui;
      t.tuis = dict.back().tuis;
    } else {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "C%07zu", i);
      t.cui = buf;
      t.tuis = {tuis[tui(rng)]};
    }
    dict.push_back(std::move(t));
  }
  return dict;
}

KnowledgeBase ToKb(const std::vector<DictTerm> &dict) {
  std::vector<Concept> concepts;
  for (const auto &t : dict) {
    Concept c;
    c.cui = t.cui;
    c.terms.push_back({t.text, "POR"});
    c.tuis.insert(t.tuis.begin(), t.tuis.end());
    concepts.push_back(std::move(c));
  }
  return KnowledgeBase::FromConcepts(std::move(concepts));
}

std::string RandomQuery(Rng &rng, const std::vector<DictTerm> &dict) {
  std::bernoulli_distribution fresh(0.3);
  if (dict.empty() || fresh(rng)) {
    return RandomWord(rng, 1, 6) + (fresh(rng) ? " " + RandomWord(rng, 2, 6) : "");
  }
  std::uniform_int_distribution<size_t> pick(0, dict.size() - 1);
  std::vector<std::string> cps = CodePoints(dict[pick(rng)].text);
  std::uniform_int_distribution<int> edits(0, 3);
  std::uniform_int_distribution<size_t> ch(0, kAlphabet.size() - 1);
  for (int e = edits(rng); e > 0 && cps.size() > 1; --e) {
    std::uniform_int_distribution<size_t> at(0, cps.size() - 1);
    size_t i = at(rng);
    if (cps[i] == " ") continue;
    switch (rng() % 3) {
      case 0: cps[i] = kAlphabet[ch(rng)]; break;
      case 1: cps.insert(cps.begin() + i, kAlphabet[ch(rng)]); break;
      default:
        // Never delete a one-letter word: that would leave a stray space.
        if ((i == 0 || cps[i - 1] == " ") && (i + 1 == cps.size() || cps[i + 1] == " ")) break;
        cps.erase(cps.begin() + i);
    }
  }
  std::string q;
  for (const auto &c : cps) q += c;
  return q;
}

std::vector<LookupHit> BruteLookup(const std::vector<DictTerm> &dict, const std::string &query,
                                   int n, Similarity m, double alpha) {
  const auto q = Grams(query, n);
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<LookupHit> hits;
  for (const auto &t : dict) {
    if (!seen.emplace(t.text, t.cui).second) continue;
    double s = Score(m, Grams(t.text, n), q);
    if (q.empty() || s < alpha) continue;
    std::vector<std::string> tuis = t.tuis;
    std::sort(tuis.begin(), tuis.end());
    hits.push_back({t.text, t.cui, tuis, s});
  }
  std::sort(hits.begin(), hits.end(), [](const LookupHit &a, const LookupHit &b) {
    return std::tie(b.score, a.term, a.cui) < std::tie(a.score, b.term, b.cui);
  });
  return hits;
}

GramDict Precompute(const std::vector<DictTerm> &dict, int n) {
  GramDict out;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto &t : dict) {
    if (!seen.emplace(t.text, t.cui).second) continue;
    out.terms.push_back(t);
    std::sort(out.terms.back().tuis.begin(), out.terms.back().tuis.end());
    out.grams.push_back(Grams(t.text, n));
  }
  return out;
}

std::vector<size_t> SharedCounts(const GramDict &dict, const std::vector<std::string> &query) {
  std::vector<size_t> out;
  out.reserve(dict.grams.size());
  for (const auto &g : dict.grams) {
    size_t shared = 0;
    auto a = g.begin();
    auto b = query.begin();
    while (a != g.end() && b != query.end()) {
      int c = a->compare(*b);
      if (c == 0) {
        ++shared;
        ++a;
        ++b;
      } else if (c < 0) {
        ++a;
      } else {
        ++b;
      }
    }
    out.push_back(shared);
  }
  return out;
}

std::vector<LookupHit> BruteLookup(const GramDict &dict, const std::vector<std::string> &query,
                                   const std::vector<size_t> &shared, Similarity m,
                                   double alpha) {
  std::vector<LookupHit> hits;
  if (query.empty()) return hits;
  for (size_t i = 0; i < dict.terms.size(); ++i) {
    double s = ScoreFromCounts(m, static_cast<double>(shared[i]),
                               static_cast<double>(dict.grams[i].size()),
                               static_cast<double>(query.size()));
    if (s < alpha) continue;
    hits.push_back({dict.terms[i].text, dict.terms[i].cui, dict.terms[i].tuis, s});
  }
  std::sort(hits.begin(), hits.end(), [](const LookupHit &a, const LookupHit &b) {
    return std::tie(b.score, a.term, a.cui) < std::tie(a.score, b.term, b.cui);
  });
  return hits;
}

std::vector<std::vector<Iob>> ValidPaths(size_t length) {
  std::vector<std::vector<Iob>> out;
  size_t total = 1;
  for (size_t i = 0; i < length; ++i) total *= 3;
  for (size_t code = 0; code < total; ++code) {
    std::vector<Iob> y;
    size_t c = code;
    for (size_t i = 0; i < length; ++i, c /= 3) y.push_back(static_cast<Iob>(c % 3));
    bool ok = length == 0 || y[0] != Iob::kI;
    for (size_t i = 1; ok && i < length; ++i) ok = !(y[i - 1] == Iob::kO && y[i] == Iob::kI);
    if (ok) out.push_back(std::move(y));
  }
  return out;
}

double BrutePathScore(const CrfModel &model, const EncodedSentence &x,
                      const std::vector<Iob> &y) {
  auto p = model.params();
  const size_t F = model.num_features();
  const size_t trans = F * 3;
  const size_t start = trans + 9;
  const size_t end = start + 3;
  double s = p[start + static_cast<size_t>(y.front())] + p[end + static_cast<size_t>(y.back())];
  for (size_t t = 0; t < y.size(); ++t) {
    for (uint32_t f : x[t]) s += p[f * 3 + static_cast<size_t>(y[t])];
    if (t > 0) s += p[trans + static_cast<size_t>(y[t - 1]) * 3 + static_cast<size_t>(y[t])];
  }
  return s;
}

BruteDecode Enumerate(const CrfModel &model, const EncodedSentence &x) {
  BruteDecode out;
  auto paths = ValidPaths(x.size());
  std::vector<double> scores;
  out.best_score = -std::numeric_limits<double>::infinity();
  for (const auto &y : paths) {
    double s = BrutePathScore(model, x, y);
    scores.push_back(s);
    if (s > out.best_score) {
      out.best_score = s;
      out.best = y;
    }
  }
  out.log_z = LogSumExp(scores);
  out.marginals.assign(x.size(), {0.0, 0.0, 0.0});
  for (size_t i = 0; i < paths.size(); ++i) {
    double p = std::exp(scores[i] - out.log_z);
    for (size_t t = 0; t < x.size(); ++t) {
      out.marginals[t][static_cast<size_t>(paths[i][t])] += p;
    }
  }
  return out;
}

CrfModel RandomModel(Rng &rng, size_t features, double scale) {
  std::vector<std::string> names;
  for (size_t i = 0; i < features; ++i) names.push_back("f" + std::to_string(i));
  CrfModel model(names);
  std::normal_distribution<double> w(0.0, scale);
  auto p = model.params();
  for (size_t i = 0; i < p.size(); ++i) {
    if (model.IsLearnable(i)) p[i] = w(rng);
  }
  return model;
}

EncodedSentence RandomSentence(Rng &rng, size_t length, size_t features) {
  std::uniform_int_distribution<uint32_t> f(0, static_cast<uint32_t>(features - 1));
  std::uniform_int_distribution<int> count(1, 4);
  EncodedSentence x(length);
  for (auto &tok : x) {
    for (int c = count(rng); c > 0; --c) tok.push_back(f(rng));
    std::sort(tok.begin(), tok.end());
    tok.erase(std::unique(tok.begin(), tok.end()), tok.end());
  }
  return x;
}

std::vector<Iob> RandomValidPath(Rng &rng, size_t length) {
  auto paths = ValidPaths(length);
  std::uniform_int_distribution<size_t> pick(0, paths.size() - 1);
  return paths[pick(rng)];
}

double GradientError(const CrfModel &model, const std::vector<Instance> &batch, double l2,
                     double eps, double floor) {
  NllGradient g = nll_and_gradient(model, batch, l2);
  CrfModel probe = model;
  double worst = 0.0;
  for (size_t i = 0; i < model.num_params(); ++i) {
    if (!model.IsLearnable(i)) continue;
    const double orig = model.params()[i];
    probe.params()[i] = orig + eps;
    double up = nll_and_gradient(probe, batch, l2).loss;
    probe.params()[i] = orig - eps;
    double down = nll_and_gradient(probe, batch, l2).loss;
    probe.params()[i] = orig;
    double numeric = (up - down) / (2.0 * eps);
    double denom = std::max({std::abs(numeric), std::abs(g.gradient[i]), floor});
    worst = std::max(worst, std::abs(numeric - g.gradient[i]) / denom);
  }
  return worst;
}

Layout RandomLayout(Rng &rng) {
  static const std::vector<std::string> words = {
      "doente", "com",  "dor",     "quimioterapia", "ciclo", "iniciou", "ácido",
      "fólico", "mama", "cirurgia", "sem",         "febre", "TC",      "HTA"};
  std::uniform_int_distribution<size_t> len(1, 12);
  std::uniform_int_distribution<size_t> word(0, words.size() - 1);
  std::uniform_int_distribution<int> cls(0, 2);
  std::bernoulli_distribution punct(0.1);
  std::bernoulli_distribution starts(0.3);
  std::uniform_int_distribution<size_t> mlen(1, 4);

  Layout out;
  std::vector<Span> spans;
  std::string text;
  for (size_t i = len(rng); i > 0; --i) {
    if (!text.empty()) text += ' ';
    std::string w = punct(rng) ? "," : words[word(rng)];
    spans.push_back({text.size(), text.size() + w.size()});
    text += w;
  }
  out.sentence = Sentence{"doc", 0, text, Span{0, text.size()}};
  for (size_t t = 0; t < spans.size();) {
    if (!starts(rng)) {
      ++t;
      continue;
    }
    size_t e = std::min(spans.size(), t + mlen(rng));
    out.mentions.push_back(
        {Span{spans[t].start, spans[e - 1].end}, static_cast<EntityClass>(cls(rng))});
    t = e;
  }
  return out;
}

MentionSet RandomMentionSet(Rng &rng, size_t sentences) {
  std::uniform_int_distribution<size_t> count(0, 4);
  std::uniform_int_distribution<size_t> gap(0, 6);
  std::uniform_int_distribution<size_t> width(1, 8);
  std::uniform_int_distribution<int> cls(0, 2);
  auto make = [&] {
    std::vector<Mention> out;
    size_t pos = 0;
    for (size_t i = count(rng); i > 0; --i) {
      size_t s = pos + gap(rng);
      size_t e = s + width(rng);
      out.push_back({Span{s, e}, static_cast<EntityClass>(cls(rng))});
      pos = e;
    }
    return out;
  };
  MentionSet set;
  for (size_t i = 0; i < sentences; ++i) {
    set["s#" + std::to_string(i)] = SentenceMentions{make(), make()};
  }
  return set;
}

}  // namespace clinex::oracle
