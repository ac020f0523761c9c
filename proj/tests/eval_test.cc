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
#include "clinex/eval.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace clinex {
namespace {

const EntityClass kDrug = EntityClass::kDrug;
const EntityClass kDisease = EntityClass::kDisease;

MentionSet One(std::vector<Mention> gold, std::vector<Mention> pred) {
  return {{"s#0", {std::move(gold), std::move(pred)}}};
}

void ExpectPrf(const PRF &p, double precision, double recall, double f1) {
  EXPECT_NEAR(p.precision, precision, 1e-12);
  EXPECT_NEAR(p.recall, recall, 1e-12);
  EXPECT_NEAR(p.f1, f1, 1e-12);
}

TEST(StrictTest, HandCases) {
  Mention a{{0, 4}, kDrug}, b{{5, 9}, kDrug}, c{{10, 14}, kDrug}, d{{15, 19}, kDrug};
  ExpectPrf(strict_prf(One({a, b}, {a, b})), 1, 1, 1);
  ExpectPrf(strict_prf(One({a}, {{{5, 9}, kDrug}})), 0, 0, 0);
  ExpectPrf(strict_prf(One({a, b, c}, {a, b, d})), 2.0 / 3, 2.0 / 3, 2.0 / 3);
  ExpectPrf(strict_prf(One({}, {})), 1, 1, 1);
  ExpectPrf(strict_prf(One({a}, {})), 0, 0, 0);
}

TEST(RelaxedTest, HandCases) {
  Mention gold{{0, 10}, kDrug};
  Mention partial{{4, 14}, kDrug};
  ExpectPrf(relaxed_prf(One({gold}, {partial})), 1, 1, 1);
  ExpectPrf(strict_prf(One({gold}, {partial})), 0, 0, 0);
  // One wide prediction covering two gold mentions recalls both.
  Mention g1{{0, 4}, kDrug}, g2{{6, 10}, kDrug};
  PRF wide = relaxed_prf(One({g1, g2}, {{{0, 10}, kDrug}}));
  ExpectPrf(wide, 1, 1, 1);
  EXPECT_EQ(wide.gold_matched, 2u);
  EXPECT_EQ(wide.pred_matched, 1u);
  ExpectPrf(relaxed_prf(One({gold}, {{{4, 14}, kDisease}})), 0, 0, 0);
}

TEST(MetricsTest, ClassFilter) {
  MentionSet set = One({{{0, 4}, kDrug}, {{6, 9}, kDisease}}, {{{0, 4}, kDrug}});
  ExpectPrf(strict_prf(set, kDrug), 1, 1, 1);
  ExpectPrf(strict_prf(set, kDisease), 0, 0, 0);
  ExpectPrf(strict_prf(set), 1, 0.5, 2.0 / 3);
}

TEST(MetricsTest, RelaxedDominatesStrictAndSwapSymmetry) {
  oracle::Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    MentionSet set = oracle::RandomMentionSet(rng, 5);
    PRF s = strict_prf(set);
    PRF r = relaxed_prf(set);
    EXPECT_GE(r.precision, s.precision);
    EXPECT_GE(r.recall, s.recall);
    MentionSet swapped = set;
    for (auto &[id, m] : swapped) std::swap(m.gold, m.pred);
    EXPECT_DOUBLE_EQ(strict_prf(swapped).precision, s.recall);
    EXPECT_DOUBLE_EQ(relaxed_prf(swapped).recall, r.precision);
  }
}

Corpus Gold() {
  Sentence s0{"d", 0, "tomou paracetamol", {}};
  Sentence s1{"d", 1, "tem melanoma", {}};
  return {to_iob(s0, {{{6, 17}, kDrug}}), to_iob(s1, {{{4, 12}, kDisease}})};
}

TEST(ReportTest, PerfectAndEmpty) {
  Predictions perfect = {{"d#0", {{{6, 17}, kDrug}}}, {"d#1", {{{4, 12}, kDisease}}}};
  Predictions empty = {{"d#0", {}}, {"d#1", {}}};
  Report r = evaluate_run(Gold(), {{"A", perfect}, {"B", empty}});
  EXPECT_EQ(r.rows, (std::vector<std::string>{"Procedures", "Drugs", "Diseases", "Aggregated"}));
  for (size_t row = 0; row < r.rows.size(); ++row) {
    EXPECT_EQ(FormatPercent(r.cells[row][0].strict.f1), "100.0");
    if (row > 0) EXPECT_EQ(r.cells[row][1].strict.recall, 0.0);
  }
  EXPECT_EQ(FormatPercent(0.95), "95.0");
  EXPECT_NE(RenderReport(r).find("100.0"), std::string::npos);
  EXPECT_EQ(RenderReportCsv(r).substr(0, 8), "dataset,");
}

TEST(ReportTest, IdMismatch) {
  Predictions missing = {{"d#0", {}}};
  EXPECT_THROW(evaluate_run(Gold(), {{"A", missing}}), DataError);
  Predictions extra = {{"d#0", {}}, {"d#1", {}}, {"x#9", {}}};
  EXPECT_THROW(evaluate_run(Gold(), {{"A", extra}}), DataError);
}

}  // namespace
}  // namespace clinex
