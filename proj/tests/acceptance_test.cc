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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Usage: acceptance_test [criterion...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "clinex/annotation.h"
#include "clinex/corpus.h"
#include "clinex/crf.h"
#include "clinex/demo.h"
#include "clinex/error.h"
#include "clinex/eval.h"
#include "clinex/linker.h"
#include "clinex/matcher.h"
#include "clinex/seed.h"
#include "clinex/synthetic.h"
#include "oracles.h"

namespace clinex {
namespace {

// Pinned tolerances and sizes.
constexpr size_t kDictionaries = 20;
constexpr size_t kMaxTerms = 500;
constexpr size_t kQueries = 1000;
constexpr double kMatcherSeconds = 60.0;
constexpr size_t kWeightDraws = 100;
constexpr size_t kMaxDecodeLength = 5;
constexpr double kMarginalTol = 1e-9;
constexpr size_t kGradientInstances = 100;
constexpr double kGradientEps = 1e-5;
constexpr double kGradientTol = 1e-4;
// Denominator floor of the relative error, for parameters whose gradient
// is zero up to rounding.
constexpr double kGradientFloor = 1e-6;
constexpr size_t kLayouts = 1000;
constexpr size_t kMentionSets = 1000;
constexpr double kE2eF1 = 0.85;
constexpr double kE2eSeconds = 600.0;
constexpr uint64_t kDemoSeed = 7;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Format(const char *fmt, double a = 0, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

Outcome MatcherOracle() {
  auto t0 = std::chrono::steady_clock::now();
  const std::vector<Similarity> measures = {Similarity::kJaccard, Similarity::kCosine,
                                            Similarity::kDice, Similarity::kOverlap};
  const std::vector<double> alphas = {0.5, 0.7, 0.9, 1.0};
  oracle::Rng rng(20260101);
  size_t checks = 0;
  size_t mismatches = 0;
  size_t hits = 0;
  std::string first;
  for (size_t d = 0; d < kDictionaries; ++d) {
    size_t terms = d == 0 ? kMaxTerms : 25 + rng() % (kMaxTerms - 24);
    auto dict = oracle::RandomDictionary(rng, terms);
    MatcherConfig cfg;
    NGramIndex index = build_index(oracle::ToKb(dict), cfg);
    oracle::GramDict grams = oracle::Precompute(dict, cfg.n);
    for (size_t q = 0; q < kQueries; ++q) {
      std::string query = oracle::RandomQuery(rng, dict);
      auto qg = oracle::Grams(query, cfg.n);
      auto shared = oracle::SharedCounts(grams, qg);
      for (Similarity m : measures) {
        for (double a : alphas) {
          cfg.measure = m;
          cfg.alpha = a;
          auto got = lookup(index, query, cfg);
          auto want = oracle::BruteLookup(grams, qg, shared, m, a);
          ++checks;
          hits += want.size();
          if (got != want) {
            if (mismatches++ == 0) {
              first = " first: '" + query + "' " + std::string(SimilarityName(m)) +
                      Format(" alpha %.1f", a);
            }
          }
        }
      }
    }
  }
  double secs = Seconds(t0);
  Outcome o;
  o.pass = mismatches == 0 && secs < kMatcherSeconds;
  o.detail = Format("%.0f lookups, %.0f expected hits, %.0f mismatches", checks, hits,
                    mismatches) +
             Format(", %.1f s (limit %.0f s)", secs, kMatcherSeconds) + first;
  return o;
}

Outcome DecoderOracle() {
  oracle::Rng rng(20260102);
  size_t sentences = 0;
  size_t wrong_path = 0;
  double worst = 0.0;
  for (size_t draw = 0; draw < kWeightDraws; ++draw) {
    CrfModel model = oracle::RandomModel(rng, 8, 1.0 + static_cast<double>(draw % 4));
    for (size_t len = 1; len <= kMaxDecodeLength; ++len) {
      auto x = oracle::RandomSentence(rng, len, 8);
      auto brute = oracle::Enumerate(model, x);
      auto r = Decode(model, x);
      ++sentences;
      if (r.path != brute.best) ++wrong_path;
      auto m = marginals(model, x);
      for (size_t t = 0; t < len; ++t) {
        for (size_t l = 0; l < kNumLabels; ++l) {
          worst = std::max(worst, std::abs(m[t][l] - brute.marginals[t][l]));
          worst = std::max(worst, std::abs(r.marginals[t][l] - brute.marginals[t][l]));
        }
      }
    }
  }
  Outcome o;
  o.pass = wrong_path == 0 && worst <= kMarginalTol;
  o.detail = Format("%.0f sentences, %.0f Viterbi mismatches, max marginal error %.2e", sentences,
                    wrong_path, worst) +
             Format(" (tol %.0e)", kMarginalTol);
  return o;
}

Outcome GradientCheck() {
  oracle::Rng rng(20260103);
  double worst = 0.0;
  for (size_t i = 0; i < kGradientInstances; ++i) {
    const size_t len = 1 + i % 6;
    CrfModel model = oracle::RandomModel(rng, 6, 0.5);
    auto x = oracle::RandomSentence(rng, len, 6);
    std::vector<Instance> batch = {{x, oracle::RandomValidPath(rng, len)}};
    const double l2 = (i % 3 == 0) ? 0.0 : (i % 3 == 1 ? 0.01 : 0.1);
    worst = std::max(worst,
                     oracle::GradientError(model, batch, l2, kGradientEps, kGradientFloor));
  }
  Outcome o;
  o.pass = worst < kGradientTol;
  o.detail = Format("%.0f instances, max relative error %.2e (tol %.0e", kGradientInstances,
                    worst, kGradientTol) +
             Format(", eps %.0e, floor %.0e)", kGradientEps, kGradientFloor);
  return o;
}

Outcome IobRoundTrip() {
  oracle::Rng rng(20260104);
  size_t failures = 0;
  size_t mentions = 0;
  for (size_t i = 0; i < kLayouts; ++i) {
    auto layout = oracle::RandomLayout(rng);
    mentions += layout.mentions.size();
    auto back = from_iob(to_iob(layout.sentence, layout.mentions));
    std::sort(layout.mentions.begin(), layout.mentions.end());
    if (back != layout.mentions) ++failures;
  }
  const Tag b{Iob::kB, std::nullopt};
  const Tag in{Iob::kI, std::nullopt};
  const Tag o{Iob::kO, std::nullopt};
  const Tag b_drug{Iob::kB, EntityClass::kDrug};
  const Tag i_dis{Iob::kI, EntityClass::kDisease};
  std::vector<std::function<void()>> violations = {
      [&] { MakeTaggedSentence("d", 0, {"x"}, {in}, Scheme::kUntyped, EntityClass::kDrug); },
      [&] {
        MakeTaggedSentence("d", 0, {"x", "y"}, {o, in}, Scheme::kUntyped, EntityClass::kDrug);
      },
      [&] { MakeTaggedSentence("d", 0, {"x", "y"}, {b_drug, i_dis}, Scheme::kTyped); },
      [&] { MakeTaggedSentence("d", 0, {"x"}, {b}, Scheme::kTyped); },
      [&] { MakeTaggedSentence("d", 0, {"x"}, {b_drug}, Scheme::kUntyped, EntityClass::kDrug); },
      [&] {
        std::istringstream s("# d 0\nx\tI-Drug\n\n");
        ReadConll(s, "violation.conll");
      },
  };
  size_t rejected = 0;
  for (auto &v : violations) {
    try {
      v();
    } catch (const DataError &) {
      ++rejected;
    }
  }
  Outcome out;
  out.pass = failures == 0 && rejected == violations.size();
  out.detail = Format("%.0f layouts (%.0f mentions), %.0f round-trip failures", kLayouts,
                      mentions, failures) +
               Format("; %.0f/%.0f scheme violations rejected", rejected, violations.size());
  return out;
}

Outcome MetricsHandCases() {
  const EntityClass kDrug = EntityClass::kDrug;
  auto one = [](std::vector<Mention> g, std::vector<Mention> p) {
    return MentionSet{{"s#0", {std::move(g), std::move(p)}}};
  };
  auto is = [](const PRF &p, double pr, double r, double f) {
    return std::abs(p.precision - pr) < 1e-12 && std::abs(p.recall - r) < 1e-12 &&
           std::abs(p.f1 - f) < 1e-12;
  };
  Mention a{{0, 4}, kDrug}, b{{5, 9}, kDrug}, c{{10, 14}, kDrug}, d{{15, 19}, kDrug};
  std::vector<std::pair<std::string, bool>> cases = {
      {"strict gold=pred", is(strict_prf(one({a, b}, {a, b})), 1, 1, 1)},
      {"strict shifted", is(strict_prf(one({a}, {b})), 0, 0, 0)},
      {"strict ABC/ABD", is(strict_prf(one({a, b, c}, {a, b, d})), 2.0 / 3, 2.0 / 3, 2.0 / 3)},
      {"relaxed partial",
       is(relaxed_prf(one({{{0, 10}, kDrug}}, {{{4, 14}, kDrug}})), 1, 1, 1) &&
           is(strict_prf(one({{{0, 10}, kDrug}}, {{{4, 14}, kDrug}})), 0, 0, 0)},
      {"relaxed one wide pred",
       is(relaxed_prf(one({{{0, 4}, kDrug}, {{6, 10}, kDrug}}, {{{0, 10}, kDrug}})), 1, 1, 1)},
      {"relaxed wrong class",
       is(relaxed_prf(one({{{0, 10}, kDrug}}, {{{4, 14}, EntityClass::kDisease}})), 0, 0, 0)},
  };
  size_t failed = 0;
  std::string names;
  for (const auto &[name, ok] : cases) {
    if (!ok) {
      ++failed;
      names += " [" + name + "]";
    }
  }
  oracle::Rng rng(20260105);
  size_t violations = 0;
  for (size_t i = 0; i < kMentionSets; ++i) {
    MentionSet set = oracle::RandomMentionSet(rng, 4);
    PRF s = strict_prf(set);
    PRF r = relaxed_prf(set);
    if (r.precision < s.precision || r.recall < s.recall || r.f1 < s.f1) ++violations;
  }
  Outcome o;
  o.pass = failed == 0 && violations == 0;
  o.detail = Format("%.0f/%.0f hand cases, relaxed >= strict violated in %.0f", cases.size() -
                    failed, cases.size(), violations) +
             Format("/%.0f random sets", kMentionSets) + names;
  return o;
}

// Every mention of the synthetic generator is a dictionary term (directly or
// through a glossary abbreviation) of at most four tokens.
Outcome HighRecall() {
  SyntheticData data = GenerateSynthetic(DeriveSeed(kDemoSeed, "recall"), 500);
  const SemanticGroupMap map = SemanticGroupMap::Default();
  const std::vector<double> alphas = {0.1, 0.3, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  const std::vector<Similarity> measures = {Similarity::kJaccard, Similarity::kCosine,
                                            Similarity::kDice, Similarity::kOverlap};
  std::vector<Sentence> sentences;
  for (const auto &doc : data.documents) {
    for (auto &s : segment(doc)) sentences.push_back(std::move(s));
  }
  size_t gold = 0;
  size_t missed = 0;
  size_t class_missed = 0;
  size_t runs = 0;
  std::string worst;
  for (Similarity m : measures) {
    for (double alpha : alphas) {
      MatcherConfig cfg;
      cfg.measure = m;
      cfg.alpha = alpha;
      cfg.tui_filter = map.AllTuis();
      NGramIndex index = build_index(data.kb, cfg);
      Annotator annotator(index, map, data.glossary, cfg);
      size_t run_missed = 0;
      for (const auto &s : sentences) {
        AnnotatedSentence a = annotator.Annotate(s);
        for (const Mention &g : data.truth.at(s.text)) {
          ++gold;
          auto it = std::find_if(a.matches.begin(), a.matches.end(),
                                 [&](const AnnotatedMatch &x) { return x.span == g.span; });
          if (it == a.matches.end()) {
            ++run_missed;
          } else if (it->cls != g.cls) {
            ++class_missed;
          }
        }
      }
      ++runs;
      missed += run_missed;
      if (run_missed > 0 && worst.empty()) {
        worst = " first miss at " + std::string(SimilarityName(m)) + Format(" alpha %.1f", alpha);
      }
    }
  }
  Outcome o;
  o.pass = missed == 0;
  o.detail = Format("%.0f settings, %.0f gold mentions, span recall %.4f", runs, gold,
                    1.0 - static_cast<double>(missed) / static_cast<double>(gold)) +
             Format("; %.0f found with a different class", class_missed) + worst;
  return o;
}

struct DemoRuns {
  DemoResult first;
  DemoResult second;
  double first_seconds = 0.0;
};

const DemoRuns &Demo() {
  static const DemoRuns runs = [] {
    DemoRuns r;
    DemoOptions options;
    options.seed = kDemoSeed;
    auto t0 = std::chrono::steady_clock::now();
    r.first = RunDemo(options);
    r.first_seconds = Seconds(t0);
    options.threads = 1;
    r.second = RunDemo(options);
    return r;
  }();
  return runs;
}

Outcome EndToEnd() {
  const DemoRuns &runs = Demo();
  const Report &report = runs.first.report;
  size_t ner_umls = 0;
  size_t ner = 0;
  for (size_t g = 0; g < report.groups.size(); ++g) {
    if (report.groups[g] == ModeTitle(Mode::kNerUmls)) ner_umls = g;
    if (report.groups[g] == ModeTitle(Mode::kNerOnly)) ner = g;
  }
  bool ok = true;
  std::string detail = "NER & UMLS strict F1";
  for (size_t row = 0; row + 1 < report.rows.size(); ++row) {
    double f1 = report.cells[row][ner_umls].strict.f1;
    ok = ok && f1 >= kE2eF1;
    detail += " " + report.rows[row] + Format(" %.3f", f1);
  }
  const size_t agg = report.rows.size() - 1;
  double p_both = report.cells[agg][ner_umls].strict.precision;
  double p_ner = report.cells[agg][ner].strict.precision;
  ok = ok && p_both >= p_ner && runs.first_seconds < kE2eSeconds;
  Outcome o;
  o.pass = ok;
  o.detail = detail + Format(" (min %.2f); aggregated strict P %.3f vs NER %.3f", kE2eF1, p_both,
                             p_ner) +
             Format("; %.1f s (limit %.0f s)", runs.first_seconds, kE2eSeconds);
  return o;
}

Outcome Determinism() {
  const DemoRuns &runs = Demo();
  Outcome o;
  o.pass = runs.first.text == runs.second.text;
  o.detail = Format("two runs with seed %.0f, %.0f report bytes, ", kDemoSeed,
                    runs.first.text.size()) +
             (o.pass ? "identical" : "different");
  return o;
}

}  // namespace
}  // namespace clinex

int main(int argc, char **argv) {
  using namespace clinex;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"matcher_oracle", MatcherOracle},       {"decoder_oracle", DecoderOracle},
      {"gradient_check", GradientCheck},       {"iob_round_trip", IobRoundTrip},
      {"metrics_hand_cases", MetricsHandCases}, {"high_recall", HighRecall},
      {"e2e_synthetic", EndToEnd},             {"determinism", Determinism},
  };
  std::set<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto &[name, check] : criteria) {
    if (!only.empty() && !only.count(name)) continue;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  %-18s  %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
