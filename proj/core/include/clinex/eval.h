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

// Mention-level precision, recall and F1.
//
// Strict: a prediction counts only if a gold mention has the same span and
// class. Relaxed: a prediction is matched if it overlaps at least one gold
// mention of the same class, and a gold mention is recalled if at least one
// prediction of the same class overlaps it. There is no one-to-one pairing
// in the relaxed count, so one wide prediction can recall several gold
// mentions.
//
// Empty denominators: P (resp. R) is 1 when both sides are empty, else 0.

#ifndef CLINEX_EVAL_H_
#define CLINEX_EVAL_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clinex/corpus.h"
#include "clinex/kb.h"

namespace clinex {

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Strict: pred_matched == gold_matched == true positives.
  size_t pred_matched = 0;
  size_t pred_total = 0;
  size_t gold_matched = 0;
  size_t gold_total = 0;

  bool operator==(const PRF &) const = default;
};

PRF MakePrf(size_t pred_matched, size_t pred_total, size_t gold_matched,
            size_t gold_total);

struct SentenceMentions {
  std::vector<Mention> gold;
  std::vector<Mention> pred;
};

// Keyed by sentence id.
using MentionSet = std::map<std::string, SentenceMentions>;

// With `cls`, both sides are restricted to that class; otherwise all
// mentions are pooled (micro).
PRF strict_prf(const MentionSet &mentions, std::optional<EntityClass> cls = std::nullopt);
PRF relaxed_prf(const MentionSet &mentions, std::optional<EntityClass> cls = std::nullopt);

// "doc_id#sentence_index".
std::string SentenceId(const std::string &doc_id, size_t sentence_index);
inline std::string SentenceId(const TaggedSentence &s) {
  return SentenceId(s.doc_id, s.sentence_index);
}

using Predictions = std::map<std::string, std::vector<Mention>>;

struct ReportCell {
  PRF strict;
  PRF relaxed;
};

// Rows Procedures, Drugs, Diseases, Aggregated; one column group per run.
struct Report {
  std::vector<std::string> groups;
  std::vector<std::string> rows;
  // cells[row][group]
  std::vector<std::vector<ReportCell>> cells;
};

// Class rows score the sentences that have at least one gold mention of the
// class, restricted to that class; the Aggregated row pools every sentence
// and class. Throws DataError if a run's sentence ids differ from the
// corpus ids.
Report evaluate_run(const Corpus &gold,
                    const std::vector<std::pair<std::string, Predictions>> &runs);

// Aligned plain-text table, percentages to one decimal.
std::string RenderReport(const Report &report);
// Same cells as CSV, columns in table order.
std::string RenderReportCsv(const Report &report);

// "95.0" for 0.95.
std::string FormatPercent(double fraction);

}  // namespace clinex

#endif  // CLINEX_EVAL_H_
