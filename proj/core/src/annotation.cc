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

#include "clinex/annotation.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <set>

#include "clinex/error.h"
#include "clinex/unicode.h"
#include "json.hpp"

namespace clinex {

using json = nlohmann::json;

std::optional<ClassChoice> ResolveClass(const std::vector<std::string> &tuis,
                                        const SemanticGroupMap &map,
                                        std::optional<EntityClass> preferred) {
  // Smallest TUI per class.
  std::map<EntityClass, std::string> by_class;
  for (const auto &tui : std::set<std::string>(tuis.begin(), tuis.end())) {
    if (auto cls = map.ClassOf(tui)) by_class.emplace(*cls, tui);
  }
  if (by_class.empty()) return std::nullopt;
  if (preferred) {
    auto it = by_class.find(*preferred);
    if (it != by_class.end()) return ClassChoice{it->first, it->second};
  }
  auto best = std::min_element(by_class.begin(), by_class.end(),
                               [](const auto &a, const auto &b) {
                                 return ClassPriority(a.first) < ClassPriority(b.first);
                               });
  return ClassChoice{best->first, best->second};
}

std::string ToJsonLine(const AnnotatedSentence &s) {
  json matches = json::array();
  for (const auto &m : s.matches) {
    matches.push_back({{"start", m.span.start},
                       {"end", m.span.end},
                       {"cui", m.cui},
                       {"tui_set", m.tuis},
                       {"score", m.score},
                       {"class", std::string(ClassName(m.cls))}});
  }
  json j = {{"doc_id", s.doc_id},
            {"sentence_index", s.sentence_index},
            {"text", s.text},
            {"matches", std::move(matches)}};
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

AnnotatedSentence ParseAnnotationLine(std::string_view line, const std::string &source,
                                      size_t line_no) {
  AnnotatedSentence s;
  try {
    json j = json::parse(line);
    s.doc_id = j.at("doc_id").get<std::string>();
    s.sentence_index = j.at("sentence_index").get<size_t>();
    s.text = j.at("text").get<std::string>();
    for (const auto &m : j.at("matches")) {
      AnnotatedMatch am;
      am.span = Span{m.at("start").get<size_t>(), m.at("end").get<size_t>()};
      am.cui = m.at("cui").get<std::string>();
      am.tuis = m.at("tui_set").get<std::vector<std::string>>();
      am.score = m.at("score").get<double>();
      auto cls = ParseClass(m.at("class").get<std::string>());
      if (!cls) throw ParseError(source, line_no, "unknown class");
      am.cls = *cls;
      if (am.span.empty() || am.span.end > s.text.size()) {
        throw ParseError(source, line_no, "match span out of bounds");
      }
      s.matches.push_back(std::move(am));
    }
  } catch (const json::exception &e) {
    throw ParseError(source, line_no, std::string("malformed annotation: ") + e.what());
  }
  return s;
}

std::vector<AnnotatedSentence> ReadAnnotations(std::istream &in,
                                               const std::string &source) {
  std::vector<AnnotatedSentence> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    out.push_back(ParseAnnotationLine(line, source, line_no));
  }
  return out;
}

std::vector<AnnotatedSentence> ReadAnnotations(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return ReadAnnotations(in, path);
}

AnnotatedSentence Annotator::Annotate(const Sentence &sentence) const {
  AnnotatedSentence out{sentence.doc_id, sentence.sentence_index, sentence.text, {}};
  NormalizedSentence normalized = expand_abbreviations(sentence, glossary_);
  for (Match &m : scan_sentence(normalized, index_, cfg_)) {
    auto choice = ResolveClass(m.tuis, map_);
    if (!choice) continue;
    out.matches.push_back(
        AnnotatedMatch{m.span, std::move(m.cui), std::move(m.tuis), m.score, choice->cls});
  }
  return out;
}

}  // namespace clinex
