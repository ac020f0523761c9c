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

// clinex command line: annotate, curate-serve, corpus-split, corpus-stats,
// train, search, predict, evaluate, e2e-demo.
//
// Exit codes: 0 ok, 1 usage, 2 data error, 3 internal error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "clinex/annotation.h"
#include "clinex/config.h"
#include "clinex/corpus.h"
#include "clinex/crf.h"
#include "clinex/curation.h"
#include "clinex/curation_server.h"
#include "clinex/demo.h"
#include "clinex/error.h"
#include "clinex/eval.h"
#include "clinex/kb.h"
#include "clinex/linker.h"
#include "clinex/matcher.h"
#include "clinex/seed.h"
#include "clinex/textprep.h"
#include "clinex/trainer.h"
#include "clinex/unicode.h"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace clinex {
namespace {

// Writes every file to a temporary sibling first and renames them all at
// the end, so a failing command leaves no partial outputs behind.
class Outputs {
 public:
  ~Outputs() {
    for (const auto &[path, tmp] : pending_) {
      std::error_code ec;
      fs::remove(tmp, ec);
    }
  }

  void Add(const fs::path &path, const std::string &content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) throw DataError("cannot write " + tmp.string());
    pending_.emplace_back(path, tmp);
  }

  void Commit() {
    for (const auto &[path, tmp] : pending_) fs::rename(tmp, path);
    pending_.clear();
  }

 private:
  std::vector<std::pair<fs::path, fs::path>> pending_;
};

// Flags that override config keys.
class ConfigFlags {
 public:
  explicit ConfigFlags(CLI::App *app) : app_(app) {}

  void Add(const std::string &flag, const std::string &key, const std::string &help) {
    auto value = std::make_shared<std::string>();
    CLI::Option *opt = app_->add_option(flag, *value, help + " [" + key + "]");
    flags_.push_back({opt, key, value});
  }

  std::vector<std::pair<std::string, std::string>> Overrides() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto &f : flags_) {
      if (f.opt->count() > 0) out.emplace_back(f.key, *f.value);
    }
    return out;
  }

 private:
  struct Flag {
    CLI::Option *opt;
    std::string key;
    std::shared_ptr<std::string> value;
  };
  CLI::App *app_;
  std::vector<Flag> flags_;
};

struct Common {
  std::string config_path;
  std::vector<std::string> sets;
};

PipelineConfig LoadConfig(const Common &common, const ConfigFlags &flags) {
  std::vector<std::pair<std::string, std::string>> overrides;
  for (const auto &s : common.sets) overrides.push_back(ParseOverride(s));
  for (auto &o : flags.Overrides()) overrides.push_back(std::move(o));
  std::optional<std::string> path;
  if (!common.config_path.empty()) path = common.config_path;
  return ResolveConfig(path, overrides);
}

SemanticGroupMap LoadGroups(const PipelineConfig &cfg) {
  return cfg.semantic_groups_path.empty() ? SemanticGroupMap::Default()
                                          : SemanticGroupMap::Load(cfg.semantic_groups_path);
}

Glossary LoadGlossary(const PipelineConfig &cfg) {
  return cfg.glossary_path.empty() ? Glossary() : Glossary::Load(cfg.glossary_path);
}

KnowledgeBase LoadKb(const PipelineConfig &cfg) {
  if (cfg.kb_path.empty()) throw DataError("no knowledge base given (--kb or paths.kb)");
  return load_kb(cfg.kb_path, KbLoadOptions{cfg.language});
}

std::vector<fs::path> ExpandInputs(const std::vector<std::string> &inputs) {
  std::vector<fs::path> out;
  for (const auto &in : inputs) {
    fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto &e : fs::directory_iterator(p)) {
        if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      out.insert(out.end(), files.begin(), files.end());
    } else if (fs::exists(p)) {
      out.push_back(p);
    } else {
      throw DataError("no such input " + in);
    }
  }
  return out;
}

// Sentences of plain-text documents; "<stem>.notes.tsv" next to a document
// supplies its note headers.
std::vector<Sentence> ReadSentences(const std::vector<std::string> &inputs) {
  std::vector<Sentence> sentences;
  for (const fs::path &p : ExpandInputs(inputs)) {
    fs::path sidecar = p.parent_path() / (p.stem().string() + ".notes.tsv");
    std::optional<std::string> side;
    if (fs::exists(sidecar)) side = sidecar.string();
    RawDocument doc = ReadDocument(p.string(), side);
    for (auto &s : segment(doc)) sentences.push_back(std::move(s));
  }
  return dedupe(std::move(sentences));
}

Corpus ToTyped(const Corpus &corpus) {
  Corpus out = corpus;
  for (auto &s : out) {
    if (s.scheme == Scheme::kTyped) continue;
    for (auto &t : s.tags) {
      if (t.iob != Iob::kO) t.cls = s.entity_class;
    }
    s.scheme = Scheme::kTyped;
  }
  return out;
}

std::string ConllText(const Corpus &corpus) {
  std::ostringstream os;
  WriteConll(corpus, os);
  return os.str();
}

EntityClass RequireClass(const std::string &name) {
  auto c = ParseClass(name);
  if (!c) throw DataError("unknown class '" + name + "'");
  return *c;
}

Predictions ReadPredictions(const std::string &path, std::string *title) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  Predictions out;
  std::string line;
  size_t line_no = 0;
  std::optional<Mode> mode;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      auto m = ParseMode(j.at("mode").get<std::string>());
      if (!m) throw ParseError(path, line_no, "unknown mode");
      if (mode && *mode != *m) throw ParseError(path, line_no, "mixed modes in one file");
      mode = m;
      std::vector<Mention> mentions;
      for (const auto &e : j.at("entities")) {
        auto cls = ParseClass(e.at("class").get<std::string>());
        if (!cls) throw ParseError(path, line_no, "unknown class");
        mentions.push_back({Span{e.at("start").get<size_t>(), e.at("end").get<size_t>()}, *cls});
      }
      std::string id =
          SentenceId(j.at("doc_id").get<std::string>(), j.at("sentence_index").get<size_t>());
      if (!out.emplace(id, std::move(mentions)).second) {
        throw ParseError(path, line_no, "duplicate sentence " + id);
      }
    } catch (const json::exception &e) {
      throw ParseError(path, line_no, std::string("malformed prediction: ") + e.what());
    }
  }
  *title = mode ? std::string(ModeTitle(*mode)) : fs::path(path).stem().string();
  return out;
}

void AddMatcherFlags(ConfigFlags &flags) {
  flags.Add("--alpha", "matcher.alpha", "Similarity threshold");
  flags.Add("--measure", "matcher.measure", "jaccard, cosine, dice or overlap");
  flags.Add("--ngram", "matcher.n", "Character n-gram size");
  flags.Add("--max-window", "matcher.max_window", "Longest token window");
  flags.Add("--overlap", "matcher.overlap", "Overlap resolution: score or length");
}

void AddAssetFlags(ConfigFlags &flags) {
  flags.Add("--kb", "paths.kb", "Concept dictionary (CUI, term, language, TUI)");
  flags.Add("--glossary", "paths.glossary", "Abbreviation glossary");
  flags.Add("--semantic-groups", "paths.semantic_groups", "TUI to class map");
  flags.Add("--language", "general.language", "Dictionary language filter");
}

void AddTrainFlags(ConfigFlags &flags) {
  flags.Add("--learning-rate", "train.learning_rate", "Gradient step size");
  flags.Add("--batch-size", "train.batch_size", "Sentences per step");
  flags.Add("--epochs", "train.epochs", "Passes over the training data");
  flags.Add("--l2", "train.l2", "L2 regularization strength");
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace
}  // namespace clinex

int main(int argc, char **argv) {
  using namespace clinex;
  CLI::App app{"clinex: clinical entity extraction from a concept dictionary"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_path, "INI configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--set", common.sets, "Override a config key: section.key=value")
      ->allow_extra_args(false);

  std::function<void()> run;

  // annotate
  CLI::App *annotate = app.add_subcommand("annotate", "Dictionary annotation of documents");
  ConfigFlags annotate_flags(annotate);
  AddAssetFlags(annotate_flags);
  AddMatcherFlags(annotate_flags);
  std::vector<std::string> annotate_inputs;
  std::string annotate_out;
  annotate->add_option("inputs", annotate_inputs, "Documents (.txt) or directories")
      ->required();
  annotate->add_option("-o,--out", annotate_out, "Annotation JSON-lines output")->required();
  annotate->callback([&] {
    run = [&] {
      PipelineConfig cfg = LoadConfig(common, annotate_flags);
      SemanticGroupMap map = LoadGroups(cfg);
      KnowledgeBase kb = LoadKb(cfg);
      Glossary glossary = LoadGlossary(cfg);
      MatcherConfig mc = cfg.matcher;
      mc.tui_filter = map.AllTuis();
      NGramIndex index = build_index(kb, mc);
      Annotator annotator(index, map, glossary, mc);
      std::string body;
      size_t with = 0;
      size_t total = 0;
      auto sentences = ReadSentences(annotate_inputs);
      for (const auto &s : sentences) {
        AnnotatedSentence a = annotator.Annotate(s);
        with += !a.matches.empty();
        total += a.matches.size();
        body += ToJsonLine(a) + "\n";
      }
      Outputs out;
      out.Add(annotate_out, body);
      out.Commit();
      std::cout << sentences.size() << " sentences, " << with << " with candidates, " << total
                << " candidates\n";
    };
  });

  // curate-serve
  CLI::App *serve = app.add_subcommand("curate-serve", "Run the curation HTTP service");
  std::string serve_host = "127.0.0.1";
  int serve_port = 8080;
  std::string serve_state;
  std::string serve_static;
  std::string serve_annotations;
  std::string serve_glossary;
  int64_t serve_ttl = 15 * 60;
  serve->add_option("--host", serve_host, "Bind address")->capture_default_str();
  serve->add_option("--port", serve_port, "Port (0 picks one)")->capture_default_str();
  serve->add_option("--state-dir", serve_state, "Decision logs, snapshots and exports")
      ->required();
  serve->add_option("--static-dir", serve_static, "Built curation UI to serve at /");
  serve->add_option("--annotations", serve_annotations,
                    "Create a session from this annotation file at startup");
  serve->add_option("--glossary", serve_glossary, "Glossary for expansion hints");
  serve->add_option("--lease-ttl", serve_ttl, "Lease time in seconds")->capture_default_str();
  serve->callback([&] {
    run = [&] {
      std::optional<Glossary> glossary;
      if (!serve_glossary.empty()) glossary = Glossary::Load(serve_glossary);
      ServiceOptions options;
      options.state_dir = serve_state;
      options.lease_ttl_ms = serve_ttl * 1000;
      if (glossary) options.glossary = &*glossary;
      CurationService service(options);
      if (!serve_annotations.empty()) {
        std::string id = service.CreateSession(ReadAnnotations(serve_annotations));
        std::cout << "session " << id << "\n";
      }
      std::optional<std::string> static_dir;
      if (!serve_static.empty()) static_dir = serve_static;
      CurationHttpServer server(service, static_dir);
      int port = server.Bind(serve_host, serve_port);
      std::cout << "listening on http://" << serve_host << ":" << port << std::endl;
      server.Listen();
    };
  });

  // corpus-split
  CLI::App *split_cmd = app.add_subcommand(
      "corpus-split", "Seeded train/validation/test split, aggregated and per class");
  ConfigFlags split_flags(split_cmd);
  split_flags.Add("--seed", "general.seed", "Master seed");
  std::string split_corpus;
  std::string split_out;
  double test_fraction = 0.20;
  double val_fraction = 0.20;
  split_cmd->add_option("corpus", split_corpus, "Typed CoNLL corpus")->required();
  split_cmd->add_option("-o,--out-dir", split_out, "Output directory")->required();
  split_cmd->add_option("--test-fraction", test_fraction)->capture_default_str();
  split_cmd->add_option("--val-fraction", val_fraction, "Fraction of the non-test remainder")
      ->capture_default_str();
  split_cmd->callback([&] {
    run = [&] {
      PipelineConfig cfg = LoadConfig(common, split_flags);
      Corpus corpus = ToTyped(ReadConll(split_corpus));
      SplitSpec spec{test_fraction, val_fraction, DeriveSeed(cfg.seed, "split")};
      CorpusSplit parts = split(corpus, spec);
      Outputs out;
      fs::path dir(split_out);
      for (const auto &[name, part] :
           {std::pair<std::string, const Corpus *>{"train", &parts.train},
            {"validation", &parts.validation},
            {"test", &parts.test}}) {
        out.Add(dir / (name + ".conll"), ConllText(*part));
        for (EntityClass c : kEntityClasses) {
          out.Add(dir / std::string(ClassSlug(c)) / (name + ".conll"),
                  ConllText(ClassSubcorpus(*part, c)));
        }
      }
      out.Commit();
      std::cout << "train " << parts.train.size() << ", validation " << parts.validation.size()
                << ", test " << parts.test.size() << "\n";
    };
  });

  // corpus-stats
  CLI::App *stats_cmd = app.add_subcommand("corpus-stats", "Sentence and tag counts");
  std::vector<std::string> stats_files;
  std::string stats_class;
  stats_cmd->add_option("corpora", stats_files, "CoNLL files")->required();
  stats_cmd->add_option("--class", stats_class, "Entity class of untyped files");
  stats_cmd->callback([&] {
    run = [&] {
      std::optional<EntityClass> cls;
      if (!stats_class.empty()) cls = RequireClass(stats_class);
      std::vector<std::pair<std::string, StatsRow>> rows;
      for (const auto &f : stats_files) {
        rows.emplace_back(fs::path(f).filename().string(),
                          StatsByClass(ToTyped(ReadConll(f, cls))));
      }
      std::cout << RenderStatsTable(rows);
    };
  });

  // train
  CLI::App *train_cmd = app.add_subcommand("train", "Train one per-class tagger");
  ConfigFlags train_flags(train_cmd);
  AddTrainFlags(train_flags);
  train_flags.Add("--seed", "general.seed", "Master seed");
  std::string train_file, val_file, train_class, train_out;
  train_cmd->add_option("--train", train_file, "Untyped training CoNLL")->required();
  train_cmd->add_option("--val", val_file, "Untyped validation CoNLL")->required();
  train_cmd->add_option("--class", train_class, "Entity class of the corpora")->required();
  train_cmd->add_option("-o,--out", train_out, "Model file")->required();
  train_cmd->callback([&] {
    run = [&] {
      PipelineConfig cfg = LoadConfig(common, train_flags);
      EntityClass cls = RequireClass(train_class);
      TrainConfig tc = cfg.train;
      tc.seed = DeriveSeed(cfg.seed, "train." + std::string(ClassSlug(cls)));
      TrainResult r = train(ReadConll(train_file, cls), ReadConll(val_file, cls), tc);
      for (const auto &h : r.history) {
        std::cout << "epoch " << h.epoch << "  loss " << Fixed(h.train_loss, 6)
                  << "  validation F1 " << Fixed(h.val_f1, 4) << "\n";
      }
      std::cout << "best epoch " << r.best_epoch << ", validation F1 "
                << Fixed(r.best_val_f1, 4) << "\n";
      Outputs out;
      out.Add(train_out, SerializeModel(r.model) + "\n");
      out.Commit();
    };
  });

  // search
  CLI::App *search_cmd = app.add_subcommand("search", "Random hyperparameter search");
  ConfigFlags search_flags(search_cmd);
  search_flags.Add("--k", "search.k", "Number of sampled configurations");
  search_flags.Add("--threads", "search.threads", "Parallel trials (0: all cores)");
  search_flags.Add("--epochs", "train.epochs", "Epochs per trial");
  search_flags.Add("--seed", "general.seed", "Master seed");
  std::string s_train, s_val, s_class, s_out, s_trials;
  search_cmd->add_option("--train", s_train, "Untyped training CoNLL")->required();
  search_cmd->add_option("--val", s_val, "Untyped validation CoNLL")->required();
  search_cmd->add_option("--class", s_class, "Entity class of the corpora")->required();
  search_cmd->add_option("-o,--out", s_out, "Model file of the best trial")->required();
  search_cmd->add_option("--trials-csv", s_trials, "Trial table as CSV");
  search_cmd->callback([&] {
    run = [&] {
      PipelineConfig cfg = LoadConfig(common, search_flags);
      EntityClass cls = RequireClass(s_class);
      SearchSpace space;
      space.epochs = cfg.train.epochs;
      SearchResult r = random_search(
          space, cfg.search_k, ReadConll(s_train, cls), ReadConll(s_val, cls),
          DeriveSeed(cfg.seed, "search." + std::string(ClassSlug(cls))), TemplateFeaturizer(),
          cfg.search_threads);
      std::string csv = "trial,learning_rate,batch_size,l2,epochs,best_epoch,val_f1\n";
      for (const auto &t : r.trials) {
        std::cout << "trial " << t.index << ": learning_rate " << t.config.learning_rate
                  << ", batch_size " << t.config.batch_size << ", l2 " << t.config.l2
                  << "; best epoch " << t.best_epoch << ", validation F1 "
                  << Fixed(t.val_f1, 4) << "\n";
        std::ostringstream row;
        row << t.index << ',' << t.config.learning_rate << ',' << t.config.batch_size << ','
            << t.config.l2 << ',' << t.config.epochs << ',' << t.best_epoch << ','
            << Fixed(t.val_f1, 6) << '\n';
        csv += row.str();
      }
      const Trial &best = r.trials[r.best_trial];
      std::cout << "chosen: trial " << best.index << " (learning_rate "
                << best.config.learning_rate << ", batch_size " << best.config.batch_size
                << ", l2 " << best.config.l2 << ", epoch " << best.best_epoch
                << ", validation F1 " << Fixed(best.val_f1, 4) << ")\n";
      Outputs out;
      out.Add(s_out, SerializeModel(r.best.model) + "\n");
      if (!s_trials.empty()) out.Add(s_trials, csv);
      out.Commit();
    };
  });

  // predict
  CLI::App *predict_cmd = app.add_subcommand("predict", "Extract entities");
  ConfigFlags predict_flags(predict_cmd);
  AddAssetFlags(predict_flags);
  AddMatcherFlags(predict_flags);
  predict_flags.Add("--link-threshold", "link.threshold", "Similarity needed to link a span");
  std::string p_mode = "ner_umls", p_out, p_input_class;
  std::vector<std::string> p_inputs, p_models;
  predict_cmd->add_option("--mode", p_mode, "umls_only, ner_only or ner_umls")
      ->capture_default_str();
  predict_cmd->add_option("inputs", p_inputs, "CoNLL corpora or plain-text documents")
      ->required();
  predict_cmd->add_option("--model", p_models, "Tagger model as CLASS=PATH (repeatable)")
      ->allow_extra_args(false);
  predict_cmd->add_option("--input-class", p_input_class, "Class of untyped CoNLL inputs");
  predict_cmd->add_option("-o,--out", p_out, "Prediction JSON-lines output")->required();
  predict_cmd->callback([&] {
    run = [&] {
      PipelineConfig cfg = LoadConfig(common, predict_flags);
      auto mode = ParseMode(p_mode);
      if (!mode) throw CLI::ValidationError("--mode", "unknown mode " + p_mode);
      SemanticGroupMap map = LoadGroups(cfg);
      Glossary glossary = LoadGlossary(cfg);
      std::optional<KnowledgeBase> kb;
      std::optional<NGramIndex> index;
      PredictAssets assets;
      assets.map = &map;
      assets.glossary = &glossary;
      assets.matcher = cfg.matcher;
      assets.matcher.tui_filter = map.AllTuis();
      assets.link = cfg.link;
      if (*mode != Mode::kNerOnly) {
        kb = LoadKb(cfg);
        index = build_index(*kb, assets.matcher);
        assets.index = &*index;
      }
      std::map<EntityClass, CrfModel> models;
      for (const auto &spec : p_models) {
        size_t eq = spec.find('=');
        if (eq == std::string::npos) throw DataError("--model expects CLASS=PATH");
        models[RequireClass(spec.substr(0, eq))] = LoadModel(spec.substr(eq + 1));
      }
      for (const auto &[c, m] : models) assets.models[c] = &m;
      TemplateFeaturizer featurizer;
      assets.featurizer = &featurizer;

      struct Item {
        std::string doc_id;
        size_t index;
        std::string text;
      };
      std::vector<Item> items;
      std::vector<std::string> documents;
      for (const auto &in : p_inputs) {
        if (fs::path(in).extension() == ".conll") {
          std::optional<EntityClass> ic;
          if (!p_input_class.empty()) ic = RequireClass(p_input_class);
          for (const auto &s : ReadConll(in, ic)) {
            items.push_back({s.doc_id, s.sentence_index, s.text});
          }
        } else {
          documents.push_back(in);
        }
      }
      if (!documents.empty()) {
        for (const auto &s : ReadSentences(documents)) {
          items.push_back({s.doc_id, s.sentence_index, s.text});
        }
      }
      std::string body;
      size_t entities = 0;
      for (const auto &it : items) {
        auto found = predict(it.text, *mode, assets);
        entities += found.size();
        body += PredictionJsonLine(it.doc_id, it.index, it.text, *mode, found) + "\n";
      }
      Outputs out;
      out.Add(p_out, body);
      out.Commit();
      std::cout << items.size() << " sentences, " << entities << " entities\n";
    };
  });

  // evaluate
  CLI::App *eval_cmd = app.add_subcommand("evaluate", "Strict and relaxed P/R/F1 report");
  std::string e_gold, e_csv;
  std::vector<std::string> e_preds;
  eval_cmd->add_option("--gold", e_gold, "Typed CoNLL gold corpus")->required();
  eval_cmd->add_option("--pred", e_preds, "Prediction JSON-lines (repeatable)")
      ->required()
      ->allow_extra_args(false);
  eval_cmd->add_option("--csv", e_csv, "Also write the report as CSV");
  eval_cmd->callback([&] {
    run = [&] {
      Corpus gold = ToTyped(ReadConll(e_gold));
      std::vector<std::pair<std::string, Predictions>> runs;
      for (const auto &p : e_preds) {
        std::string title;
        Predictions preds = ReadPredictions(p, &title);
        runs.emplace_back(title, std::move(preds));
      }
      Report report = evaluate_run(gold, runs);
      if (!e_csv.empty()) {
        Outputs out;
        out.Add(e_csv, RenderReportCsv(report));
        out.Commit();
      }
      std::cout << RenderReport(report);
    };
  });

  // e2e-demo
  CLI::App *demo = app.add_subcommand("e2e-demo", "Full pipeline on synthetic data");
  ConfigFlags demo_flags(demo);
  demo_flags.Add("--seed", "general.seed", "Master seed");
  demo_flags.Add("--k", "search.k", "Trials per class");
  demo_flags.Add("--threads", "search.threads", "Parallel trials (0: all cores)");
  size_t demo_sentences = 500;
  std::string demo_out;
  demo->add_option("--sentences", demo_sentences, "Generated sentences")->capture_default_str();
  demo->add_option("-o,--out-dir", demo_out, "Write intermediate artifacts here");
  demo->callback([&] {
    run = [&] {
      PipelineConfig cfg = LoadConfig(common, demo_flags);
      DemoOptions options;
      options.seed = cfg.seed;
      options.sentences = demo_sentences;
      options.search_k = cfg.search_k;
      options.threads = cfg.search_threads;
      if (!demo_out.empty()) options.out_dir = demo_out;
      std::cout << RunDemo(options).text;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 1;
  }
  try {
    run();
  } catch (const CLI::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
