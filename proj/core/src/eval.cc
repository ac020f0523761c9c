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

#include "clinex/eval.h"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <set>
#include <sstream>

#include "clinex/error.h"

namespace clinex {

namespace {

std::vector<Mention> OfClass(const std::vector<Mention> &mentions,
                             std::optional<EntityClass> cls) {
  if (!cls) return mentions;
  std::vector<Mention> out;
  for (const auto &m : mentions) {
    if (m.cls == *cls) out.push_back(m);
  }
  return out;
}

double Ratio(size_t num, size_t den, bool other_side_empty) {
  if (den == 0) return other_side_empty ? 1.0 : 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

PRF MakePrf(size_t pred_matched, size_t pred_total, size_t gold_matched,
            size_t gold_total) {
  PRF p;
  p.pred_matched = pred_matched;
  p.pred_total = pred_total;
  p.gold_matched = gold_matched;
  p.gold_total = gold_total;
  p.precision = Ratio(pred_matched, pred_total, gold_total == 0);
  p.recall = Ratio(gold_matched, gold_total, pred_total == 0);
  p.f1 = p.precision + p.recall > 0.0
             ? 2.0 * p.precision * p.recall / (p.precision + p.recall)
             : 0.0;
  return p;
}

PRF strict_prf(const MentionSet &mentions, std::optional<EntityClass> cls) {
  size_t tp = 0;
  size_t pred_total = 0;
  size_t gold_total = 0;
  for (const auto &[id, s] : mentions) {
    auto gold = OfClass(s.gold, cls);
    auto pred = OfClass(s.pred, cls);
    std::set<Mention> gold_set(gold.begin(), gold.end());
    std::set<Mention> pred_set(pred.begin(), pred.end());
    gold_total += gold_set.size();
    pred_total += pred_set.size();
    for (const auto &m : pred_set) tp += gold_set.count(m);
  }
  return MakePrf(tp, pred_total, tp, gold_total);
}

PRF relaxed_prf(const MentionSet &mentions, std::optional<EntityClass> cls) {
  size_t matched = 0;
  size_t recalled = 0;
  size_t pred_total = 0;
  size_t gold_total = 0;
  auto hits = [](const Mention &m, const std::vector<Mention> &others) {
    return std::any_of(others.begin(), others.end(), [&](const Mention &o) {
      return o.cls == m.cls && o.span.Overlaps(m.span);
    });
  };
  for (const auto &[id, s] : mentions) {
    auto gold = OfClass(s.gold, cls);
    auto pred = OfClass(s.pred, cls);
    pred_total += pred.size();
    gold_total += gold.size();
    for (const auto &p : pred) matched += hits(p, gold);
    for (const auto &g : gold) recalled += hits(g, pred);
  }
  return MakePrf(matched, pred_total, recalled, gold_total);
}

std::string SentenceId(const std::string &doc_id, size_t sentence_index) {
  return doc_id + "#" + std::to_string(sentence_index);
}

Report evaluate_run(const Corpus &gold,
                    const std::vector<std::pair<std::string, Predictions>> &runs) {
  std::map<std::string, std::vector<Mention>> gold_by_id;
  for (const auto &s : gold) {
    if (!gold_by_id.emplace(SentenceId(s), from_iob(s)).second) {
      throw DataError("duplicate sentence id " + SentenceId(s) + " in gold corpus");
    }
  }

  Report report;
  for (EntityClass c : kEntityClasses) report.rows.push_back(std::string(ClassName(c)) + "s");
  report.rows.push_back("Aggregated");
  report.cells.assign(report.rows.size(), {});

  for (const auto &[name, predictions] : runs) {
    report.groups.push_back(name);
    for (const auto &[id, mentions] : predictions) {
      if (!gold_by_id.count(id)) {
        throw DataError("run '" + name + "' has predictions for unknown sentence " + id);
      }
    }
    if (predictions.size() != gold_by_id.size()) {
      throw DataError("run '" + name + "' covers " + std::to_string(predictions.size()) +
                      " of " + std::to_string(gold_by_id.size()) + " sentences");
    }
    MentionSet all;
    for (const auto &[id, g] : gold_by_id) all[id] = {g, predictions.at(id)};

    for (size_t r = 0; r < kEntityClasses.size(); ++r) {
      EntityClass c = kEntityClasses[r];
      MentionSet subset;
      for (const auto &[id, sm] : all) {
        bool has = std::any_of(sm.gold.begin(), sm.gold.end(),
                               [&](const Mention &m) { return m.cls == c; });
        if (has) subset.emplace(id, sm);
      }
      report.cells[r].push_back({strict_prf(subset, c), relaxed_prf(subset, c)});
    }
    report.cells.back().push_back({strict_prf(all), relaxed_prf(all)});
  }
  return report;
}

std::string FormatPercent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * fraction);
  return buf;
}

std::string RenderReport(const Report &report) {
  std::ostringstream out;
  const int label = 12;
  const int cell = 7;
  const int group_width = 6 * cell + 3;
  out << std::setw(label) << "";
  for (const auto &g : report.groups) {
    out << " | " << std::left << std::setw(group_width - 3) << g << std::right;
  }
  out << "\n" << std::setw(label) << "";
  for (size_t i = 0; i < report.groups.size(); ++i) {
    out << " | " << std::left << std::setw(3 * cell) << "Strict" << std::setw(3 * cell)
        << "Relaxed" << std::right;
  }
  out << "\n" << std::setw(label) << "";
  for (size_t i = 0; i < report.groups.size(); ++i) {
    out << " | ";
    for (int k = 0; k < 2; ++k) {
      out << std::left << std::setw(cell) << "P" << std::setw(cell) << "R"
          << std::setw(cell) << "F1" << std::right;
    }
  }
  out << "\n";
  for (size_t r = 0; r < report.rows.size(); ++r) {
    out << std::left << std::setw(label) << report.rows[r] << std::right;
    for (const auto &c : report.cells[r]) {
      out << " | ";
      for (const PRF *p : {&c.strict, &c.relaxed}) {
        out << std::left << std::setw(cell) << FormatPercent(p->precision)
            << std::setw(cell) << FormatPercent(p->recall) << std::setw(cell)
            << FormatPercent(p->f1) << std::right;
      }
    }
    out << "\n";
  }
  out << "Aggregated pools mentions of all classes (micro). Class rows score the\n"
         "sentences with at least one gold mention of the class. Relaxed counts a\n"
         "prediction (gold mention) as matched (recalled) when any same-class\n"
         "mention on the other side overlaps it.\n";
  return out.str();
}

std::string RenderReportCsv(const Report &report) {
  std::ostringstream out;
  out << "dataset";
  for (const auto &g : report.groups) {
    for (const char *kind : {"strict", "relaxed"}) {
      for (const char *m : {"P", "R", "F1"}) out << ',' << g << ' ' << kind << ' ' << m;
    }
  }
  out << '\n';
  for (size_t r = 0; r < report.rows.size(); ++r) {
    out << report.rows[r];
    for (const auto &c : report.cells[r]) {
      for (const PRF *p : {&c.strict, &c.relaxed}) {
        out << ',' << FormatPercent(p->precision) << ',' << FormatPercent(p->recall) << ','
            << FormatPercent(p->f1);
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace clinex
