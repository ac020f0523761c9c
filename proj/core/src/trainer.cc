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

#include "clinex/trainer.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "clinex/error.h"
#include "clinex/eval.h"
#include "clinex/seed.h"

namespace clinex {

namespace {

EntityClass CheckUntyped(const Corpus &corpus, const char *what,
                         std::optional<EntityClass> expected) {
  if (corpus.empty()) throw DataError(std::string(what) + " corpus is empty");
  std::optional<EntityClass> cls = expected;
  for (const auto &s : corpus) {
    if (s.scheme != Scheme::kUntyped) {
      throw DataError(std::string(what) + " corpus must use the untyped scheme (sentence " +
                      SentenceId(s) + ")");
    }
    if (!s.entity_class) {
      throw DataError(std::string(what) + " sentence " + SentenceId(s) +
                      " has no entity class");
    }
    if (!cls) cls = s.entity_class;
    if (*cls != *s.entity_class) {
      throw DataError(std::string(what) + " corpus mixes entity classes " +
                      std::string(ClassName(*cls)) + " and " +
                      std::string(ClassName(*s.entity_class)));
    }
    ValidateTags(s);
  }
  return *cls;
}

}  // namespace

std::vector<std::string> TokenTexts(const TaggedSentence &s) {
  std::vector<std::string> out;
  out.reserve(s.tokens.size());
  for (const auto &t : s.tokens) out.push_back(t.text);
  return out;
}

TaggedSentence TagSentence(const CrfModel &model, const TaggedSentence &s,
                           const TokenFeaturizer &featurizer, EntityClass cls) {
  TaggedSentence out = s;
  out.scheme = Scheme::kUntyped;
  out.entity_class = cls;
  DecodeResult d = viterbi(model, model.Encode(TokenTexts(s), featurizer));
  out.tags.clear();
  for (Iob l : d.path) out.tags.push_back(Tag{l, std::nullopt});
  return out;
}

double ValidationF1(const CrfModel &model, const Corpus &val,
                    const TokenFeaturizer &featurizer) {
  MentionSet set;
  for (const auto &s : val) {
    EntityClass cls = s.entity_class.value_or(EntityClass::kDisease);
    set[SentenceId(s)] = {from_iob(s), from_iob(TagSentence(model, s, featurizer, cls))};
  }
  return strict_prf(set).f1;
}

TrainResult train(const Corpus &train_corpus, const Corpus &val_corpus,
                  const TrainConfig &cfg, const TokenFeaturizer &featurizer) {
  cfg.Validate();
  EntityClass cls = CheckUntyped(train_corpus, "training", std::nullopt);
  CheckUntyped(val_corpus, "validation", cls);

  std::vector<std::vector<std::string>> token_lists;
  token_lists.reserve(train_corpus.size());
  for (const auto &s : train_corpus) token_lists.push_back(TokenTexts(s));
  CrfModel model = MakeModel(token_lists, featurizer);

  std::vector<Instance> instances;
  instances.reserve(train_corpus.size());
  for (size_t i = 0; i < train_corpus.size(); ++i) {
    Instance inst;
    inst.features = model.Encode(token_lists[i], featurizer);
    for (const Tag &t : train_corpus[i].tags) inst.labels.push_back(t.iob);
    instances.push_back(std::move(inst));
  }

  std::mt19937_64 rng(cfg.seed);
  std::vector<size_t> order(instances.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<Instance> batch;

  TrainResult result;
  std::vector<double> best_params(model.params().begin(), model.params().end());
  double best_f1 = -1.0;

  for (size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss = 0.0;
    for (size_t b = 0; b < order.size(); b += cfg.batch_size) {
      size_t e = std::min(order.size(), b + cfg.batch_size);
      batch.clear();
      for (size_t i = b; i < e; ++i) batch.push_back(instances[order[i]]);
      NllGradient ng = nll_and_gradient(model, batch, cfg.l2);
      loss += ng.loss;
      const double step = cfg.learning_rate / static_cast<double>(batch.size());
      std::span<double> w = model.params();
      for (size_t p = 0; p < w.size(); ++p) {
        if (ng.gradient[p] != 0.0) w[p] -= step * ng.gradient[p];
      }
    }
    double f1 = ValidationF1(model, val_corpus, featurizer);
    result.history.push_back({epoch, loss / static_cast<double>(instances.size()), f1});
    if (f1 > best_f1) {
      best_f1 = f1;
      result.best_epoch = epoch;
      std::copy(model.params().begin(), model.params().end(), best_params.begin());
    }
  }

  std::copy(best_params.begin(), best_params.end(), model.params().begin());
  result.best_val_f1 = best_f1;
  ModelMetadata &meta = model.metadata();
  meta.config = cfg;
  meta.best_epoch = result.best_epoch;
  meta.val_f1 = best_f1;
  meta.entity_class = cls;
  meta.featurizer = featurizer.name();
  result.model = std::move(model);
  return result;
}

TrainResult train(const Corpus &train_corpus, const Corpus &val_corpus,
                  const TrainConfig &cfg) {
  return train(train_corpus, val_corpus, cfg, TemplateFeaturizer());
}

void SearchSpace::Validate() const {
  if (learning_rates.empty() || batch_sizes.empty() || l2s.empty()) {
    throw std::invalid_argument("search space has an empty dimension");
  }
  for (const auto &c : Enumerate()) c.Validate();
}

std::vector<TrainConfig> SearchSpace::Enumerate() const {
  std::vector<TrainConfig> out;
  for (double lr : learning_rates) {
    for (size_t bs : batch_sizes) {
      for (double l2 : l2s) {
        TrainConfig c;
        c.learning_rate = lr;
        c.batch_size = bs;
        c.l2 = l2;
        c.epochs = epochs;
        out.push_back(c);
      }
    }
  }
  return out;
}

std::vector<TrainConfig> SampleConfigs(const SearchSpace &space, size_t k, uint64_t seed) {
  space.Validate();
  std::vector<TrainConfig> all = space.Enumerate();
  std::vector<size_t> idx(all.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(std::min(k, idx.size()));
  std::vector<TrainConfig> out;
  for (size_t i = 0; i < idx.size(); ++i) {
    TrainConfig c = all[idx[i]];
    c.seed = DeriveSeed(seed, static_cast<uint64_t>(i));
    out.push_back(c);
  }
  return out;
}

SearchResult random_search(const SearchSpace &space, size_t k, const Corpus &train_corpus,
                           const Corpus &val_corpus, uint64_t seed,
                           const TokenFeaturizer &featurizer, size_t threads) {
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  std::vector<TrainConfig> configs = SampleConfigs(space, k, seed);
  std::vector<std::optional<TrainResult>> results(configs.size());

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, configs.size());
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (size_t i = next++; i < configs.size(); i = next++) {
      try {
        results[i] = train(train_corpus, val_corpus, configs[i], featurizer);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = configs.size();
      }
    }
  };
  std::vector<std::thread> pool;
  for (size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto &t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  SearchResult out;
  for (size_t i = 0; i < configs.size(); ++i) {
    out.trials.push_back({i, configs[i], results[i]->best_epoch, results[i]->best_val_f1});
    if (results[i]->best_val_f1 > results[out.best_trial]->best_val_f1) out.best_trial = i;
  }
  out.best = std::move(*results[out.best_trial]);
  return out;
}

}  // namespace clinex
