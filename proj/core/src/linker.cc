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

#include "clinex/linker.h"

#include <algorithm>
#include <stdexcept>

#include "clinex/annotation.h"
#include "clinex/error.h"
#include "json.hpp"

namespace clinex {

using json = nlohmann::json;

std::string_view ModeName(Mode m) {
  switch (m) {
    case Mode::kUmlsOnly: return "umls_only";
    case Mode::kNerOnly: return "ner_only";
    case Mode::kNerUmls: return "ner_umls";
  }
  return "";
}

std::string_view ModeTitle(Mode m) {
  switch (m) {
    case Mode::kUmlsOnly: return "UMLS";
    case Mode::kNerOnly: return "NER";
    case Mode::kNerUmls: return "NER & UMLS";
  }
  return "";
}

std::optional<Mode> ParseMode(std::string_view name) {
  for (Mode m : kModes) {
    if (ModeName(m) == name) return m;
  }
  return std::nullopt;
}

std::vector<Candidate> merge_predictions(const std::vector<Token> &tokens,
                                         const std::vector<ClassDecode> &decodes) {
  std::vector<Candidate> all;
  for (const ClassDecode &d : decodes) {
    if (d.tokens.size() != tokens.size() || d.decode.path.size() != tokens.size()) {
      throw DataError(std::string(ClassName(d.cls)) + " decode has " +
                      std::to_string(d.decode.path.size()) + " tags for " +
                      std::to_string(tokens.size()) + " tokens");
    }
    for (size_t i = 0; i < tokens.size(); ++i) {
      if (d.tokens[i] != tokens[i].text) {
        throw DataError(std::string(ClassName(d.cls)) + " decode token " + std::to_string(i) +
                        " is '" + d.tokens[i] + "', expected '" + tokens[i].text + "'");
      }
    }
    const auto &path = d.decode.path;
    for (size_t b = 0; b < path.size(); ++b) {
      if (path[b] != Iob::kB) continue;
      size_t e = b + 1;
      while (e < path.size() && path[e] == Iob::kI) ++e;
      Candidate c;
      c.token_begin = b;
      c.token_end = e;
      c.span = Span{tokens[b].span.start, tokens[e - 1].span.end};
      c.source = d.cls;
      c.confidence = d.decode.marginals.empty() ? 1.0 : span_confidence(d.decode, b, e);
      all.push_back(c);
    }
  }

  std::sort(all.begin(), all.end(), [](const Candidate &a, const Candidate &b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.span.length() != b.span.length()) return a.span.length() > b.span.length();
    if (a.span.start != b.span.start) return a.span.start < b.span.start;
    return a.source < b.source;
  });
  std::vector<Candidate> kept;
  for (const Candidate &c : all) {
    bool clash = std::any_of(kept.begin(), kept.end(),
                             [&](const Candidate &k) { return k.span.Overlaps(c.span); });
    if (!clash) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(),
            [](const Candidate &a, const Candidate &b) { return a.span < b.span; });
  return kept;
}

void LinkConfig::Validate() const {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("link threshold must be in (0, 1]");
  }
}

std::optional<LinkedEntity> link(const Candidate &candidate, std::string_view sentence,
                                 const NGramIndex &index, const SemanticGroupMap &map,
                                 const Glossary &glossary, const LinkConfig &cfg) {
  if (candidate.span.end > sentence.size() || candidate.span.empty()) {
    throw std::out_of_range("candidate span outside sentence");
  }
  std::string surface(sentence.substr(candidate.span.start, candidate.span.length()));
  MatcherConfig mc;
  mc.n = index.n();
  mc.measure = cfg.measure;
  mc.alpha = cfg.threshold;
  auto hits = lookup(index, expand_abbreviations(surface, glossary).text, mc);
  if (hits.empty()) return std::nullopt;
  const LookupHit &best = hits.front();
  auto choice = ResolveClass(best.tuis, map, candidate.source);
  if (!choice) return std::nullopt;
  LinkedEntity e;
  e.span = candidate.span;
  e.text = std::move(surface);
  e.cui = best.cui;
  e.tui = choice->tui;
  e.cls = choice->cls;
  e.similarity = best.score;
  e.confidence = candidate.confidence;
  e.source = candidate.source;
  return e;
}

namespace {

const Glossary &EmptyGlossary() {
  static const Glossary g;
  return g;
}

std::vector<Candidate> TaggerCandidates(const std::vector<Token> &tokens,
                                        const PredictAssets &assets) {
  if (assets.models.empty()) throw DataError("no tagger models loaded");
  if (!assets.featurizer) throw DataError("no featurizer given");
  std::vector<std::string> words;
  for (const auto &t : tokens) words.push_back(t.text);
  std::vector<ClassDecode> decodes;
  for (const auto &[cls, model] : assets.models) {
    if (!model) throw DataError(std::string(ClassName(cls)) + " model missing");
    if (model->metadata().featurizer != assets.featurizer->name()) {
      throw DataError(std::string(ClassName(cls)) + " model was trained with featurizer '" +
                      model->metadata().featurizer + "'");
    }
    decodes.push_back({cls, words, Decode(*model, model->Encode(words, *assets.featurizer))});
  }
  return merge_predictions(tokens, decodes);
}

}  // namespace

std::vector<LinkedEntity> predict(std::string_view sentence, Mode mode,
                                  const PredictAssets &assets) {
  const Glossary &glossary = assets.glossary ? *assets.glossary : EmptyGlossary();
  std::vector<LinkedEntity> out;
  if (mode != Mode::kNerOnly && (!assets.index || !assets.map)) {
    throw DataError(std::string(ModeName(mode)) + " needs a KB index and semantic groups");
  }

  if (mode == Mode::kUmlsOnly) {
    NormalizedSentence ns = expand_abbreviations(sentence, glossary);
    for (Match &m : scan_sentence(ns, *assets.index, assets.matcher)) {
      auto choice = ResolveClass(m.tuis, *assets.map);
      if (!choice) continue;
      LinkedEntity e;
      e.span = m.span;
      e.text = std::string(sentence.substr(m.span.start, m.span.length()));
      e.cui = std::move(m.cui);
      e.tui = choice->tui;
      e.cls = choice->cls;
      e.similarity = m.score;
      out.push_back(std::move(e));
    }
    return out;
  }

  std::vector<Token> tokens = Tokenize(sentence);
  if (tokens.empty()) return out;
  for (const Candidate &c : TaggerCandidates(tokens, assets)) {
    if (mode == Mode::kNerOnly) {
      LinkedEntity e;
      e.span = c.span;
      e.text = std::string(sentence.substr(c.span.start, c.span.length()));
      e.cls = c.source;
      e.confidence = c.confidence;
      e.source = c.source;
      out.push_back(std::move(e));
    } else if (auto e = link(c, sentence, *assets.index, *assets.map, glossary, assets.link)) {
      out.push_back(std::move(*e));
    }
  }
  return out;
}

std::vector<Mention> ToMentions(const std::vector<LinkedEntity> &entities) {
  std::vector<Mention> out;
  for (const auto &e : entities) out.push_back({e.span, e.cls});
  return out;
}

std::string PredictionJsonLine(const std::string &doc_id, size_t sentence_index,
                               const std::string &text, Mode mode,
                               const std::vector<LinkedEntity> &entities) {
  json list = json::array();
  for (const auto &e : entities) {
    json j = {{"start", e.span.start},
              {"end", e.span.end},
              {"text", e.text},
              {"cui", e.cui ? json(*e.cui) : json(nullptr)},
              {"tui", e.tui ? json(*e.tui) : json(nullptr)},
              {"class", std::string(ClassName(e.cls))},
              {"similarity", e.similarity ? json(*e.similarity) : json(nullptr)},
              {"confidence", e.confidence ? json(*e.confidence) : json(nullptr)},
              {"source", e.source ? json(std::string(ClassName(*e.source))) : json(nullptr)}};
    list.push_back(std::move(j));
  }
  json j = {{"doc_id", doc_id},
            {"sentence_index", sentence_index},
            {"text", text},
            {"mode", std::string(ModeName(mode))},
            {"entities", std::move(list)}};
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

}  // namespace clinex
