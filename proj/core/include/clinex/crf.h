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

// Linear-chain CRF over the untyped {B, I, O} label set.
//
// Score of a label path y for a sentence with per-token feature sets F_t:
//
//   score(y) = start[y_0] + sum_t sum_{f in F_t} w[f, y_t]
//            + sum_{t>0} trans[y_{t-1}, y_t] + end[y_{n-1}]
//
// start[I] and trans[O, I] are hard constraints fixed at -inf; they are not
// parameters. Inference runs in log space.

#ifndef CLINEX_CRF_H_
#define CLINEX_CRF_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "clinex/corpus.h"
#include "clinex/features.h"
#include "clinex/kb.h"

namespace clinex {

inline constexpr size_t kNumLabels = 3;
inline constexpr std::array<Iob, kNumLabels> kLabels = {Iob::kB, Iob::kI, Iob::kO};

inline size_t LabelIndex(Iob l) { return static_cast<size_t>(l); }

bool IsAllowedStart(Iob l);
bool IsAllowedTransition(Iob from, Iob to);

struct TrainConfig {
  double learning_rate = 0.05;
  size_t batch_size = 8;
  size_t epochs = 30;
  double l2 = 0.0;
  uint64_t seed = 0;

  // Throws std::invalid_argument on out-of-range fields.
  void Validate() const;
  bool operator==(const TrainConfig &) const = default;
};

struct ModelMetadata {
  TrainConfig config;
  size_t best_epoch = 0;
  double val_f1 = 0.0;
  std::optional<EntityClass> entity_class;
  std::string featurizer = std::string(TemplateFeaturizer::kName);

  bool operator==(const ModelMetadata &) const = default;
};

// Feature ids per token.
using EncodedSentence = std::vector<std::vector<uint32_t>>;

struct Instance {
  EncodedSentence features;
  std::vector<Iob> labels;
};

class CrfModel {
 public:
  CrfModel() = default;
  explicit CrfModel(std::vector<std::string> feature_names);

  // Parameter layout: emission[f * 3 + label], then transitions[from * 3 +
  // to], then start[3], then end[3]. Entries for forbidden moves stay 0 and
  // are never read.
  size_t num_features() const { return feature_names_.size(); }
  size_t num_params() const { return params_.size(); }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  size_t TransitionOffset() const { return num_features() * kNumLabels; }
  size_t StartOffset() const { return TransitionOffset() + kNumLabels * kNumLabels; }
  size_t EndOffset() const { return StartOffset() + kNumLabels; }

  // False for the slots of forbidden start/transition moves.
  bool IsLearnable(size_t param) const;

  double emission(uint32_t feature, size_t label) const {
    return params_[feature * kNumLabels + label];
  }
  // -inf for forbidden moves.
  double transition(size_t from, size_t to) const;
  double start(size_t label) const;
  double end(size_t label) const { return params_[EndOffset() + label]; }

  const std::vector<std::string> &feature_names() const { return feature_names_; }
  std::optional<uint32_t> FeatureId(const std::string &name) const;

  // Features the model has not seen are dropped.
  EncodedSentence Encode(const std::vector<std::string> &tokens,
                         const TokenFeaturizer &featurizer) const;

  ModelMetadata &metadata() { return metadata_; }
  const ModelMetadata &metadata() const { return metadata_; }

  bool operator==(const CrfModel &other) const {
    return feature_names_ == other.feature_names_ && params_ == other.params_ &&
           metadata_ == other.metadata_;
  }

 private:
  std::vector<std::string> feature_names_;
  std::unordered_map<std::string, uint32_t> feature_ids_;
  std::vector<double> params_;
  ModelMetadata metadata_;
};

// Builds the feature table from every feature seen in the sentences, in
// order of first occurrence.
CrfModel MakeModel(const std::vector<std::vector<std::string>> &sentences,
                   const TokenFeaturizer &featurizer);

struct DecodeResult {
  std::vector<Iob> path;
  double path_score = 0.0;
  double log_z = 0.0;
  // marginals[t][label] = P(y_t = label | x).
  std::vector<std::array<double, kNumLabels>> marginals;
};

// Unnormalized score of a path; -inf if it violates a hard constraint.
double PathScore(const CrfModel &model, const EncodedSentence &x,
                 const std::vector<Iob> &y);

double LogPartition(const CrfModel &model, const EncodedSentence &x);

// Best path only (path and path_score; no marginals). Ties at each
// back-pointer go to the lower label in B < I < O order.
DecodeResult viterbi(const CrfModel &model, const EncodedSentence &x);

std::vector<std::array<double, kNumLabels>> marginals(const CrfModel &model,
                                                      const EncodedSentence &x);

// Viterbi path plus log-partition and marginals.
DecodeResult Decode(const CrfModel &model, const EncodedSentence &x);

struct NllGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};

// loss = sum_i (log Z_i - score(y_i)) + (l2 / 2) * ||w||^2 and its gradient
// (expected minus empirical feature counts plus l2 * w).
NllGradient nll_and_gradient(const CrfModel &model, std::span<const Instance> batch,
                             double l2);

// Mean marginal probability of the decoded tag over tokens [begin, end).
double span_confidence(const DecodeResult &decode, size_t begin, size_t end);

void SaveModel(const CrfModel &model, const std::string &path);
CrfModel LoadModel(const std::string &path);
std::string SerializeModel(const CrfModel &model);
CrfModel DeserializeModel(const std::string &text, const std::string &source);

}  // namespace clinex

#endif  // CLINEX_CRF_H_
