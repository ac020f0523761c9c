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

#include "clinex/demo.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "clinex/annotation.h"
#include "clinex/curation.h"
#include "clinex/linker.h"
#include "clinex/matcher.h"
#include "clinex/seed.h"
#include "clinex/synthetic.h"

namespace clinex {

namespace fs = std::filesystem;

namespace {

// What a reader of the written CoNLL file sees: sentence text is rebuilt
// from the tokens, so later stages work on exactly that.
Corpus ThroughConll(const Corpus &corpus) {
  std::stringstream buf;
  WriteConll(corpus, buf);
  return ReadConll(buf, "<demo>");
}

// Accepts candidates that equal a true mention, rejects the rest and adds
// the true mentions no candidate covered.
void CurateItem(CurationService &service, const std::string &session,
                const CurationItem &item, const std::vector<Mention> &truth,
                const std::string &annotator) {
  uint64_t version = item.version;
  std::vector<Mention> accepted;
  for (const auto &c : item.candidates) {
    Mention m{c.match.span, c.match.cls};
    bool good = std::find(truth.begin(), truth.end(), m) != truth.end();
    DecisionRecord r;
    r.item_id = item.id;
    r.action = good ? Action::kAccept : Action::kReject;
    r.candidate_id = c.id;
    r.annotator = annotator;
    r.base_version = version;
    version = service.Decide(session, r);
    if (good) accepted.push_back(m);
  }
  for (const Mention &m : truth) {
    if (std::find(accepted.begin(), accepted.end(), m) != accepted.end()) continue;
    DecisionRecord r;
    r.item_id = item.id;
    r.action = Action::kAdd;
    r.span = m.span;
    r.cls = m.cls;
    r.annotator = annotator;
    r.base_version = version;
    version = service.Decide(session, r);
  }
}

void WriteText(const fs::path &path, const std::string &text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw DataError("cannot write " + path.string());
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string ConfigText(const TrainConfig &c) {
  std::ostringstream os;
  os << "learning_rate " << c.learning_rate << ", batch_size " << c.batch_size << ", l2 "
     << c.l2;
  return os.str();
}

}  // namespace

DemoResult RunDemo(const DemoOptions &options) {
  DemoResult result;
  std::optional<fs::path> out;
  if (options.out_dir) out = fs::path(*options.out_dir);

  SyntheticData data = GenerateSynthetic(DeriveSeed(options.seed, "synthetic"),
                                         options.sentences);
  result.documents = data.documents.size();
  const SemanticGroupMap map = SemanticGroupMap::Default();
  MatcherConfig matcher;
  matcher.tui_filter = map.AllTuis();
  const NGramIndex index = build_index(data.kb, matcher);

  std::vector<Sentence> sentences;
  for (const auto &doc : data.documents) {
    for (auto &s : segment(doc)) sentences.push_back(std::move(s));
  }
  sentences = dedupe(std::move(sentences));
  result.sentences = sentences.size();

  Annotator annotator(index, map, data.glossary, matcher);
  std::vector<AnnotatedSentence> annotated;
  for (const auto &s : sentences) {
    annotated.push_back(annotator.Annotate(s));
    result.candidates += annotated.back().matches.size();
  }

  ServiceOptions service_options;
  int64_t tick = 0;
  service_options.clock = [&tick] { return tick++; };
  if (out) service_options.state_dir = (*out / "curation").string();
  CurationService service(service_options);
  const std::string session = service.CreateSession(annotated);
  const std::vector<std::string> curators = {"ana", "bruno"};
  for (size_t turn = 0;; ++turn) {
    const std::string &who = curators[turn % curators.size()];
    auto batch = service.NextBatch(session, who, 25);
    if (batch.empty()) break;
    for (const auto &item : batch) {
      CurateItem(service, session, item, data.truth.at(item.text), who);
    }
  }
  result.curation = service.GetProgress(session);
  ExportResult exported = service.Export(session);

  SplitSpec spec;
  spec.seed = DeriveSeed(options.seed, "split");
  result.split = split(exported.aggregated, spec);
  result.split.train = ThroughConll(result.split.train);
  result.split.validation = ThroughConll(result.split.validation);
  result.split.test = ThroughConll(result.split.test);

  TemplateFeaturizer featurizer;
  SearchSpace space;
  std::map<EntityClass, CrfModel> models;
  for (EntityClass c : kEntityClasses) {
    Corpus train_c = ClassSubcorpus(result.split.train, c);
    Corpus val_c = ClassSubcorpus(result.split.validation, c);
    SearchResult search =
        random_search(space, options.search_k, train_c, val_c,
                      DeriveSeed(options.seed, "search." + std::string(ClassSlug(c))),
                      featurizer, options.threads);
    result.searches.push_back({c, train_c.size(), val_c.size(), search.trials,
                               search.best_trial});
    models.emplace(c, std::move(search.best.model));
  }

  PredictAssets assets;
  assets.index = &index;
  assets.map = &map;
  assets.glossary = &data.glossary;
  assets.matcher = matcher;
  assets.featurizer = &featurizer;
  for (const auto &[c, m] : models) assets.models[c] = &m;

  std::vector<std::pair<std::string, Predictions>> runs;
  std::map<Mode, std::string> prediction_lines;
  for (Mode mode : kModes) {
    Predictions p;
    for (const auto &s : result.split.test) {
      auto entities = predict(s.text, mode, assets);
      p[SentenceId(s)] = ToMentions(entities);
      prediction_lines[mode] +=
          PredictionJsonLine(s.doc_id, s.sentence_index, s.text, mode, entities) + "\n";
    }
    runs.emplace_back(std::string(ModeTitle(mode)), std::move(p));
  }
  result.report = evaluate_run(result.split.test, runs);

  std::ostringstream text;
  size_t terms = 0;
  for (const auto &c : data.kb.concepts()) terms += c.terms.size();
  text << "Synthetic end-to-end run, seed " << options.seed << "\n"
       << "Knowledge base: " << data.kb.size() << " concepts, " << terms << " terms; glossary "
       << data.glossary.size() << " abbreviations\n"
       << "Documents: " << result.documents << "; sentences after de-duplication: "
       << result.sentences << "\n"
       << "Annotation: " << result.candidates << " candidates in "
       << std::count_if(annotated.begin(), annotated.end(),
                        [](const AnnotatedSentence &a) { return !a.matches.empty(); })
       << " sentences\n"
       << "Curation: " << result.curation.accepted << " accepted, "
       << result.curation.rejected << " rejected, " << result.curation.additions
       << " added, " << result.curation.decisions << " decisions, "
       << result.curation.conflicts << " conflicts\n"
       << "Curated corpus: " << exported.aggregated.size() << " sentences\n\n";
  text << RenderStatsTable({{"Train", StatsByClass(result.split.train)},
                            {"Validation", StatsByClass(result.split.validation)},
                            {"Test", StatsByClass(result.split.test)}})
       << "\n";
  for (const auto &s : result.searches) {
    text << "Random search, " << ClassName(s.cls) << " (" << s.train_sentences << " train, "
         << s.val_sentences << " validation sentences)\n";
    for (const auto &t : s.trials) {
      text << (t.index == s.best_trial ? "  * " : "    ") << "trial " << t.index << ": "
           << ConfigText(t.config) << "; best epoch " << t.best_epoch << ", validation F1 "
           << Fixed(t.val_f1, 4) << "\n";
    }
  }
  text << "\nTest split, " << result.split.test.size() << " sentences\n"
       << RenderReport(result.report);
  result.text = text.str();

  if (out) {
    std::ostringstream kb;
    WriteKb(data.kb, kb);
    WriteText(*out / "kb.tsv", kb.str());
    std::string glossary;
    for (const auto &[k, v] : data.glossary.entries()) glossary += k + "\t" + v + "\n";
    WriteText(*out / "glossary.tsv", glossary);
    for (const auto &doc : data.documents) {
      WriteText(*out / "documents" / (doc.doc_id + ".txt"), doc.text);
    }
    std::string lines;
    for (const auto &a : annotated) lines += ToJsonLine(a) + "\n";
    WriteText(*out / "annotations.jsonl", lines);
    for (const auto &[name, corpus] :
         {std::pair<std::string, const Corpus *>{"train", &result.split.train},
          {"validation", &result.split.validation},
          {"test", &result.split.test}}) {
      std::ostringstream os;
      WriteConll(*corpus, os);
      WriteText(*out / "corpus" / (name + ".conll"), os.str());
    }
    fs::create_directories(*out / "models");
    for (const auto &[c, m] : models) {
      SaveModel(m, (*out / "models" / (std::string(ClassSlug(c)) + ".json")).string());
    }
    for (const auto &[mode, body] : prediction_lines) {
      WriteText(*out / "predictions" / (std::string(ModeName(mode)) + ".jsonl"), body);
    }
    WriteText(*out / "report.txt", result.text);
    WriteText(*out / "report.csv", RenderReportCsv(result.report));
  }
  return result;
}

}  // namespace clinex
