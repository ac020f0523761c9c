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

#include "clinex/error.h"
#include "clinex/linker.h"
#include "clinex/trainer.h"
#include "gtest/gtest.h"

namespace clinex {
namespace {

ClassDecode MakeDecode(EntityClass cls, const std::vector<Token> &tokens,
                       std::vector<Iob> path, std::vector<double> conf) {
  ClassDecode d;
  d.cls = cls;
  for (const auto &t : tokens) d.tokens.push_back(t.text);
  d.decode.path = path;
  for (size_t t = 0; t < path.size(); ++t) {
    std::array<double, kNumLabels> m{0, 0, 0};
    m[static_cast<size_t>(path[t])] = conf[t];
    m[path[t] == Iob::kO ? 0 : 2] = 1.0 - conf[t];
    d.decode.marginals.push_back(m);
  }
  return d;
}

constexpr Iob B = Iob::kB, I = Iob::kI, O = Iob::kO;

TEST(MergeTest, DisjointMentionsKept) {
  auto tokens = Tokenize("a b c d");
  auto m = merge_predictions(tokens, {MakeDecode(EntityClass::kDrug, tokens, {B, O, O, O},
                                                 {0.9, 1, 1, 1}),
                                      MakeDecode(EntityClass::kDisease, tokens, {O, O, B, I},
                                                 {1, 1, 0.8, 0.8})});
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].source, EntityClass::kDrug);
  EXPECT_EQ(m[1].span, (Span{4, 7}));
}

TEST(MergeTest, HigherConfidenceWins) {
  auto tokens = Tokenize("a b");
  auto m = merge_predictions(tokens, {MakeDecode(EntityClass::kDrug, tokens, {B, O}, {0.9, 1}),
                                      MakeDecode(EntityClass::kDisease, tokens, {B, O},
                                                 {0.7, 1})});
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].source, EntityClass::kDrug);
  EXPECT_NEAR(m[0].confidence, 0.9, 1e-12);
}

TEST(MergeTest, NestedEqualConfidenceKeepsLonger) {
  auto tokens = Tokenize("a b c");
  auto m = merge_predictions(
      tokens, {MakeDecode(EntityClass::kProcedure, tokens, {O, B, O}, {1, 0.8, 1}),
               MakeDecode(EntityClass::kDisease, tokens, {B, I, I}, {0.8, 0.8, 0.8})});
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].source, EntityClass::kDisease);
  EXPECT_EQ(m[0].token_end, 3u);
}

TEST(MergeTest, TokenMismatchIsError) {
  auto tokens = Tokenize("a b");
  auto other = Tokenize("a c");
  EXPECT_THROW(merge_predictions(tokens, {MakeDecode(EntityClass::kDrug, other, {B, O},
                                                     {1, 1})}),
               DataError);
}

class LinkTest : public ::testing::Test {
 protected:
  void SetUp() override {
    map_ = SemanticGroupMap::Default();
    kb_ = KnowledgeBase::FromConcepts({
        {"C0000970", {{"paracetamol", "POR"}}, {"T121"}},
        {"C0000002", {{"sulfato ferroso", "POR"}}, {"T121", "T047"}},
    });
    matcher_.tui_filter = map_.AllTuis();
    index_ = build_index(kb_, matcher_);
  }
  std::optional<LinkedEntity> Link(const std::string &text, Span span, EntityClass source) {
    Candidate c{0, 1, span, source, 0.9};
    return link(c, text, index_, map_, glossary_, LinkConfig{});
  }
  SemanticGroupMap map_;
  KnowledgeBase kb_;
  MatcherConfig matcher_;
  NGramIndex index_;
  Glossary glossary_;
};

TEST_F(LinkTest, KnownTermLinks) {
  auto e = Link("tomou paracetamol", Span{6, 17}, EntityClass::kDisease);
  ASSERT_TRUE(e);
  EXPECT_EQ(e->cls, EntityClass::kDrug);
  EXPECT_EQ(e->cui, "C0000970");
  EXPECT_EQ(e->similarity, 1.0);
}

TEST_F(LinkTest, UnknownTermDiscarded) {
  EXPECT_FALSE(Link("tomou xyzzy", Span{6, 11}, EntityClass::kDrug));
}

TEST_F(LinkTest, SourceClassPreferred) {
  auto e = Link("sulfato ferroso", Span{0, 15}, EntityClass::kDrug);
  ASSERT_TRUE(e);
  EXPECT_EQ(e->cls, EntityClass::kDrug);
  EXPECT_EQ(e->tui, "T121");
  e = Link("sulfato ferroso", Span{0, 15}, EntityClass::kProcedure);
  ASSERT_TRUE(e);
  EXPECT_EQ(e->cls, EntityClass::kDisease);
}

TEST_F(LinkTest, PredictModes) {
  // The tagger learns both "paracetamol" and "xyzzy" as drugs; only the
  // former is in the dictionary.
  Corpus corpus;
  const std::vector<std::string> drugs = {"paracetamol", "xyzzy"};
  const std::vector<std::string> ctx = {"tomou", "fez", "iniciou", "manteve"};
  size_t n = 0;
  for (const auto &d : drugs) {
    for (const auto &c : ctx) {
      corpus.push_back(MakeTaggedSentence("d", n++, {c, d, "hoje"},
                                          {{O, std::nullopt}, {B, std::nullopt},
                                           {O, std::nullopt}},
                                          Scheme::kUntyped, EntityClass::kDrug));
    }
  }
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.batch_size = 2;
  TrainResult r = train(corpus, corpus, cfg);
  TemplateFeaturizer featurizer;
  PredictAssets assets;
  assets.index = &index_;
  assets.map = &map_;
  assets.glossary = &glossary_;
  assets.matcher = matcher_;
  assets.featurizer = &featurizer;
  assets.models[EntityClass::kDrug] = &r.model;

  auto texts = [](const std::vector<LinkedEntity> &v) {
    std::vector<std::string> out;
    for (const auto &e : v) out.push_back(e.text);
    return out;
  };
  const std::string s = "tomou paracetamol e xyzzy hoje";
  for (Mode m : kModes) {
    auto found = texts(predict(s, m, assets));
    EXPECT_NE(std::find(found.begin(), found.end(), "paracetamol"), found.end()) << ModeName(m);
    EXPECT_TRUE(predict("", m, assets).empty());
  }
  auto ner = texts(predict(s, Mode::kNerOnly, assets));
  EXPECT_NE(std::find(ner.begin(), ner.end(), "xyzzy"), ner.end());
  auto both = texts(predict(s, Mode::kNerUmls, assets));
  EXPECT_EQ(std::find(both.begin(), both.end(), "xyzzy"), both.end());
}

TEST(ModeTest, Names) {
  for (Mode m : kModes) EXPECT_EQ(ParseMode(ModeName(m)), m);
  EXPECT_EQ(ModeTitle(Mode::kNerUmls), "NER & UMLS");
}

}  // namespace
}  // namespace clinex
