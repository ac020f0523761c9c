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

#include <sstream>

#include "clinex/error.h"
#include "clinex/kb.h"
#include "clinex/textprep.h"
#include "clinex/unicode.h"
#include "gtest/gtest.h"

namespace clinex {
namespace {

KnowledgeBase Parse(const std::string &text) {
  std::istringstream in(text);
  return ParseKb(in, "test.tsv");
}

TEST(KbTest, SingleRow) {
  auto kb = Parse("C0020538\thipertensão arterial\tPOR\tT047\n");
  ASSERT_EQ(kb.size(), 1u);
  EXPECT_EQ(kb.concepts()[0].cui, "C0020538");
  EXPECT_EQ(kb.concepts()[0].tuis, std::set<std::string>{"T047"});
  EXPECT_EQ(kb.concepts()[0].terms[0].text, "hipertensão arterial");
}

TEST(KbTest, RowsWithSameCuiMerge) {
  auto kb = Parse(
      "C0020538\thipertensão arterial\tPOR\tT047\n"
      "C0020538\tHTA\tPOR\tT047\n");
  ASSERT_EQ(kb.size(), 1u);
  EXPECT_EQ(kb.concepts()[0].terms.size(), 2u);
  ASSERT_NE(kb.Find("C0020538"), nullptr);
}

TEST(KbTest, BadTuiReportsLine) {
  try {
    Parse("C0020538\thipertensão\tPOR\tT047\nC0020539\tx\tPOR\tX047\n");
    FAIL() << "no error";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(KbTest, LanguageFilter) {
  std::istringstream in("C0000001\tfebre\tPOR\tT184\nC0000001\tfever\tENG\tT184\n");
  auto kb = ParseKb(in, "kb", KbLoadOptions{"POR"});
  ASSERT_EQ(kb.size(), 1u);
  EXPECT_EQ(kb.concepts()[0].terms.size(), 1u);
}

TEST(KbTest, WriteParseRoundTrip) {
  auto kb = Parse("C0000001\tfebre\tPOR\tT184\nC0000002\tparacetamol\tPOR\tT121\n");
  std::ostringstream out;
  WriteKb(kb, out);
  EXPECT_EQ(Parse(out.str()), kb);
}

TEST(SemanticGroupsTest, ClassOf) {
  auto map = SemanticGroupMap::Default();
  EXPECT_EQ(class_of("T061", map), EntityClass::kProcedure);
  EXPECT_EQ(class_of("T195", map), EntityClass::kDrug);
  EXPECT_EQ(class_of("T999", map), std::nullopt);
  EXPECT_EQ(map.size(), 20u);
}

TEST(SemanticGroupsTest, RelevantTuis) {
  auto map = SemanticGroupMap::Default();
  EXPECT_EQ(relevant_tuis(EntityClass::kDrug, map),
            (std::set<std::string>{"T121", "T122", "T195", "T200"}));
  EXPECT_EQ(relevant_tuis(EntityClass::kProcedure, map),
            (std::set<std::string>{"T058", "T059", "T060", "T061"}));
  EXPECT_TRUE(relevant_tuis(EntityClass::kDisease, SemanticGroupMap()).empty());
}

TEST(SemanticGroupsTest, ConflictingRowsRejected) {
  std::istringstream in("T047\tDisease\nT047\tDrug\n");
  EXPECT_THROW(SemanticGroupMap::Parse(in, "groups"), DataError);
}

std::vector<std::string> Texts(const std::vector<Sentence> &s) {
  std::vector<std::string> out;
  for (const auto &x : s) out.push_back(x.text);
  return out;
}

TEST(SegmentTest, PeriodAndUppercase) {
  auto s = segment(MakeDocument("d", "Doente estável. Mantém plano."));
  EXPECT_EQ(Texts(s), (std::vector<std::string>{"Doente estável.", "Mantém plano."}));
  EXPECT_EQ(s[1].sentence_index, 1u);
}

TEST(SegmentTest, NewlinesAndBullets) {
  auto s = segment(MakeDocument("d", "TA 120/80 mmHg\n- sem queixas\n- mantém terapêutica"));
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].text, "TA 120/80 mmHg");
}

TEST(SegmentTest, EmptyDocument) { EXPECT_TRUE(segment(MakeDocument("d", "")).empty()); }

TEST(SegmentTest, SourceSpansPointIntoDocument) {
  const std::string text = "Iniciou QT. Sem febre.\nRetorno em 3 semanas.";
  for (const auto &s : segment(MakeDocument("d", text))) {
    EXPECT_EQ(Nfkc(text.substr(s.source_span.start, s.source_span.length())), s.text);
  }
}

TEST(DedupeTest, WhitespaceCollapse) {
  std::vector<Sentence> in = {{"d", 0, "a b", {}}, {"d", 1, "a  b", {}}, {"d", 2, "c", {}}};
  EXPECT_EQ(Texts(dedupe(in)), (std::vector<std::string>{"a b", "c"}));
}

TEST(DedupeTest, KeepsFirst) {
  std::vector<Sentence> in = {{"d", 0, "x", {}}, {"d", 1, "y", {}}, {"d", 2, "x", {}}};
  EXPECT_EQ(Texts(dedupe(in)), (std::vector<std::string>{"x", "y"}));
  std::vector<Sentence> distinct = {{"d", 0, "x", {}}, {"d", 1, "y", {}}};
  EXPECT_EQ(dedupe(distinct), distinct);
}

TEST(GlossaryTest, Expansion) {
  Glossary g;
  g.Add("HTA", "hipertensão arterial");
  NormalizedSentence n = expand_abbreviations("HTA controlada", g);
  EXPECT_EQ(n.text, "hipertensão arterial controlada");
  const size_t width = std::string("hipertensão arterial").size();
  for (size_t i = 0; i < width; ++i) EXPECT_EQ(n.offset_map[i], 0u) << i;
  EXPECT_EQ(n.ToOriginal(Span{0, width}), (Span{0, 3}));
  size_t at = n.text.find("controlada");
  EXPECT_EQ(n.ToOriginal(Span{at, n.text.size()}), (Span{4, 14}));
}

TEST(GlossaryTest, NoHitsIsIdentity) {
  Glossary g;
  g.Add("HTA", "hipertensão arterial");
  NormalizedSentence n = expand_abbreviations("sem queixas", g);
  EXPECT_EQ(n.text, "sem queixas");
  for (size_t i = 0; i < n.text.size(); ++i) EXPECT_EQ(n.offset_map[i], i);
}

TEST(GlossaryTest, TokenBoundary) {
  Glossary g;
  g.Add("HTA", "hipertensão arterial");
  EXPECT_EQ(expand_abbreviations("HTAX", g).text, "HTAX");
}

TEST(GlossaryTest, RejectsBadEntries) {
  Glossary g;
  EXPECT_THROW(g.Add("", "x"), DataError);
  EXPECT_THROW(g.Add("A B", "x"), DataError);
  EXPECT_THROW(g.Add("QT", "QT"), DataError);
}

TEST(UnicodeTest, FoldNormalizes) {
  EXPECT_EQ(Fold("ÁCIDO  Fólico"), "ácido fólico");
  EXPECT_EQ(CodePoints("açã").size(), 3u);
  // Compatibility forms fold to their plain equivalents.
  EXPECT_EQ(Fold("ﬁbrose"), "fibrose");
}

TEST(TokenizeTest, SplitsPunctuation) {
  auto t = Tokenize("Iniciou QT, sem febre.");
  std::vector<std::string> words;
  for (const auto &x : t) words.push_back(x.text);
  EXPECT_EQ(words, (std::vector<std::string>{"Iniciou", "QT", ",", "sem", "febre", "."}));
  EXPECT_EQ(t[1].span, (Span{8, 10}));
}

}  // namespace
}  // namespace clinex
