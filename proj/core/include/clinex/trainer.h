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

// CRF training with best-validation checkpointing, and seeded random
// hyperparameter search.

#ifndef CLINEX_TRAINER_H_
#define CLINEX_TRAINER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "clinex/corpus.h"
#include "clinex/crf.h"
#include "clinex/features.h"

namespace clinex {

// Token strings of a tagged sentence.
std::vector<std::string> TokenTexts(const TaggedSentence &s);

// Viterbi tags of a sentence as an untyped tagged sentence of class `cls`.
TaggedSentence TagSentence(const CrfModel &model, const TaggedSentence &s,
                           const TokenFeaturizer &featurizer, EntityClass cls);

// Mention-level strict micro-F1 of the model on an untyped corpus.
double ValidationF1(const CrfModel &model, const Corpus &val,
                    const TokenFeaturizer &featurizer);

struct EpochRecord {
  size_t epoch = 0;  // 1-based
  double train_loss = 0.0;  // mean per sentence, including the l2 term
  double val_f1 = 0.0;
};

struct TrainResult {
  CrfModel model;  // weights of the best epoch
  std::vector<EpochRecord> history;
  size_t best_epoch = 0;
  double best_val_f1 = 0.0;
};

// Mini-batch gradient descent at a fixed rate with the batch-mean gradient.
// The training order is reshuffled every epoch from cfg.seed. The first
// epoch reaching the highest validation F1 is kept. Both corpora must be
// untyped and share one entity class; otherwise DataError.
TrainResult train(const Corpus &train_corpus, const Corpus &val_corpus,
                  const TrainConfig &cfg, const TokenFeaturizer &featurizer);
TrainResult train(const Corpus &train_corpus, const Corpus &val_corpus,
                  const TrainConfig &cfg);

struct SearchSpace {
  std::vector<double> learning_rates = {0.001, 0.003, 0.005, 0.01, 0.03, 0.05, 0.1};
  std::vector<size_t> batch_sizes = {4, 8, 16, 32, 64, 128};
  std::vector<double> l2s = {0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  size_t epochs = 30;

  // Cartesian product, learning rate outermost; seeds left at 0.
  std::vector<TrainConfig> Enumerate() const;
  void Validate() const;
};

struct Trial {
  size_t index = 0;
  TrainConfig config;
  size_t best_epoch = 0;
  double val_f1 = 0.0;
};

struct SearchResult {
  std::vector<Trial> trials;
  size_t best_trial = 0;
  TrainResult best;
};

// Configs drawn without replacement by a seeded shuffle of the enumerated
// space; k above the space size takes the whole space. Trial i trains with
// seed DeriveSeed(seed, i). The best trial has the highest validation F1,
// ties going to the lowest index. `threads` = 0 uses the hardware
// concurrency. Results do not depend on the thread count.
std::vector<TrainConfig> SampleConfigs(const SearchSpace &space, size_t k, uint64_t seed);

SearchResult random_search(const SearchSpace &space, size_t k, const Corpus &train_corpus,
                           const Corpus &val_corpus, uint64_t seed,
                           const TokenFeaturizer &featurizer, size_t threads = 0);

}  // namespace clinex

#endif  // CLINEX_TRAINER_H_
