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

#include "clinex/crf.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "clinex/error.h"
#include "json.hpp"

namespace clinex {

namespace {

using json = nlohmann::json;
using Row = std::array<double, kNumLabels>;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr size_t kB = 0;
constexpr size_t kI = 1;
constexpr size_t kO = 2;

constexpr int kFormatVersion = 1;
constexpr const char *kFormatName = "clinex-crf";

double LogSumExp(const double *x, size_t n) {
  double m = kNegInf;
  for (size_t i = 0; i < n; ++i) m = std::max(m, x[i]);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += std::exp(x[i] - m);
  return m + std::log(s);
}

std::vector<Row> Unary(const CrfModel &model, const EncodedSentence &x) {
  std::vector<Row> unary(x.size(), Row{0.0, 0.0, 0.0});
  for (size_t t = 0; t < x.size(); ++t) {
    for (uint32_t f : x[t]) {
      for (size_t l = 0; l < kNumLabels; ++l) unary[t][l] += model.emission(f, l);
    }
  }
  return unary;
}

struct Lattice {
  std::vector<Row> unary;
  std::vector<Row> alpha;
  std::vector<Row> beta;
  double log_z = 0.0;
};

Lattice ForwardBackward(const CrfModel &model, const EncodedSentence &x) {
  Lattice lat;
  const size_t n = x.size();
  lat.unary = Unary(model, x);
  if (n == 0) return lat;
  lat.alpha.resize(n);
  lat.beta.resize(n);
  for (size_t j = 0; j < kNumLabels; ++j) {
    lat.alpha[0][j] = model.start(j) + lat.unary[0][j];
  }
  std::array<double, kNumLabels> terms;
  for (size_t t = 1; t < n; ++t) {
    for (size_t j = 0; j < kNumLabels; ++j) {
      for (size_t i = 0; i < kNumLabels; ++i) {
        terms[i] = lat.alpha[t - 1][i] + model.transition(i, j);
      }
      lat.alpha[t][j] = LogSumExp(terms.data(), kNumLabels) + lat.unary[t][j];
    }
  }
  for (size_t j = 0; j < kNumLabels; ++j) terms[j] = lat.alpha[n - 1][j] + model.end(j);
  lat.log_z = LogSumExp(terms.data(), kNumLabels);

  for (size_t i = 0; i < kNumLabels; ++i) lat.beta[n - 1][i] = model.end(i);
  for (size_t t = n - 1; t-- > 0;) {
    for (size_t i = 0; i < kNumLabels; ++i) {
      for (size_t j = 0; j < kNumLabels; ++j) {
        terms[j] = model.transition(i, j) + lat.unary[t + 1][j] + lat.beta[t + 1][j];
      }
      lat.beta[t][i] = LogSumExp(terms.data(), kNumLabels);
    }
  }
  return lat;
}

std::vector<Row> Posteriors(const Lattice &lat) {
  std::vector<Row> out(lat.alpha.size());
  for (size_t t = 0; t < lat.alpha.size(); ++t) {
    for (size_t l = 0; l < kNumLabels; ++l) {
      out[t][l] = std::exp(lat.alpha[t][l] + lat.beta[t][l] - lat.log_z);
    }
  }
  return out;
}

std::string LabelName(size_t l) { return l == kB ? "B" : l == kI ? "I" : "O"; }

}  // namespace

bool IsAllowedStart(Iob l) { return l != Iob::kI; }

bool IsAllowedTransition(Iob from, Iob to) {
  return !(from == Iob::kO && to == Iob::kI);
}

void TrainConfig::Validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (!(l2 >= 0.0)) throw std::invalid_argument("l2 must be >= 0");
}

CrfModel::CrfModel(std::vector<std::string> feature_names)
    : feature_names_(std::move(feature_names)) {
  for (size_t i = 0; i < feature_names_.size(); ++i) {
    auto [it, inserted] = feature_ids_.emplace(feature_names_[i], static_cast<uint32_t>(i));
    if (!inserted) throw DataError("duplicate feature '" + feature_names_[i] + "'");
  }
  params_.assign(feature_names_.size() * kNumLabels + kNumLabels * kNumLabels +
                     2 * kNumLabels,
                 0.0);
}

bool CrfModel::IsLearnable(size_t param) const {
  return param != TransitionOffset() + kO * kNumLabels + kI &&
         param != StartOffset() + kI;
}

double CrfModel::transition(size_t from, size_t to) const {
  if (from == kO && to == kI) return kNegInf;
  return params_[TransitionOffset() + from * kNumLabels + to];
}

double CrfModel::start(size_t label) const {
  if (label == kI) return kNegInf;
  return params_[StartOffset() + label];
}

std::optional<uint32_t> CrfModel::FeatureId(const std::string &name) const {
  auto it = feature_ids_.find(name);
  if (it == feature_ids_.end()) return std::nullopt;
  return it->second;
}

EncodedSentence CrfModel::Encode(const std::vector<std::string> &tokens,
                                 const TokenFeaturizer &featurizer) const {
  EncodedSentence out(tokens.size());
  for (size_t t = 0; t < tokens.size(); ++t) {
    for (const auto &f : featurizer.Extract(tokens, t)) {
      if (auto id = FeatureId(f)) out[t].push_back(*id);
    }
  }
  return out;
}

CrfModel MakeModel(const std::vector<std::vector<std::string>> &sentences,
                   const TokenFeaturizer &featurizer) {
  std::vector<std::string> names;
  std::unordered_map<std::string, uint32_t> seen;
  for (const auto &tokens : sentences) {
    for (size_t t = 0; t < tokens.size(); ++t) {
      for (auto &f : featurizer.Extract(tokens, t)) {
        if (seen.emplace(f, static_cast<uint32_t>(names.size())).second) {
          names.push_back(std::move(f));
        }
      }
    }
  }
  CrfModel model(std::move(names));
  model.metadata().featurizer = featurizer.name();
  return model;
}

double PathScore(const CrfModel &model, const EncodedSentence &x,
                 const std::vector<Iob> &y) {
  if (x.size() != y.size()) throw std::invalid_argument("path length mismatch");
  if (x.empty()) return 0.0;
  double score = model.start(LabelIndex(y[0])) + model.end(LabelIndex(y.back()));
  for (size_t t = 0; t < x.size(); ++t) {
    const size_t l = LabelIndex(y[t]);
    for (uint32_t f : x[t]) score += model.emission(f, l);
    if (t > 0) score += model.transition(LabelIndex(y[t - 1]), l);
  }
  return score;
}

double LogPartition(const CrfModel &model, const EncodedSentence &x) {
  return ForwardBackward(model, x).log_z;
}

DecodeResult viterbi(const CrfModel &model, const EncodedSentence &x) {
  DecodeResult out;
  const size_t n = x.size();
  if (n == 0) return out;
  std::vector<Row> unary = Unary(model, x);
  std::vector<Row> delta(n);
  std::vector<std::array<uint8_t, kNumLabels>> back(n);
  for (size_t j = 0; j < kNumLabels; ++j) delta[0][j] = model.start(j) + unary[0][j];
  for (size_t t = 1; t < n; ++t) {
    for (size_t j = 0; j < kNumLabels; ++j) {
      double best = kNegInf;
      uint8_t arg = 0;
      for (size_t i = 0; i < kNumLabels; ++i) {
        double v = delta[t - 1][i] + model.transition(i, j);
        if (v > best) {
          best = v;
          arg = static_cast<uint8_t>(i);
        }
      }
      delta[t][j] = best + unary[t][j];
      back[t][j] = arg;
    }
  }
  double best = kNegInf;
  size_t last = 0;
  for (size_t j = 0; j < kNumLabels; ++j) {
    double v = delta[n - 1][j] + model.end(j);
    if (v > best) {
      best = v;
      last = j;
    }
  }
  out.path.resize(n);
  out.path[n - 1] = kLabels[last];
  for (size_t t = n - 1; t > 0; --t) {
    last = back[t][last];
    out.path[t - 1] = kLabels[last];
  }
  out.path_score = best;
  return out;
}

std::vector<std::array<double, kNumLabels>> marginals(const CrfModel &model,
                                                      const EncodedSentence &x) {
  return Posteriors(ForwardBackward(model, x));
}

DecodeResult Decode(const CrfModel &model, const EncodedSentence &x) {
  DecodeResult out = viterbi(model, x);
  Lattice lat = ForwardBackward(model, x);
  out.log_z = lat.log_z;
  out.marginals = Posteriors(lat);
  return out;
}

NllGradient nll_and_gradient(const CrfModel &model, std::span<const Instance> batch,
                             double l2) {
  NllGradient out;
  out.gradient.assign(model.num_params(), 0.0);
  std::vector<double> &g = out.gradient;
  const size_t trans = model.TransitionOffset();
  const size_t start = model.StartOffset();
  const size_t end = model.EndOffset();

  for (const Instance &inst : batch) {
    const size_t n = inst.features.size();
    if (inst.labels.size() != n) throw std::invalid_argument("labels/features mismatch");
    if (n == 0) continue;
    Lattice lat = ForwardBackward(model, inst.features);
    out.loss += lat.log_z - PathScore(model, inst.features, inst.labels);
    std::vector<Row> post = Posteriors(lat);

    for (size_t t = 0; t < n; ++t) {
      Row diff = post[t];
      diff[LabelIndex(inst.labels[t])] -= 1.0;
      for (uint32_t f : inst.features[t]) {
        double *row = &g[static_cast<size_t>(f) * kNumLabels];
        for (size_t l = 0; l < kNumLabels; ++l) row[l] += diff[l];
      }
    }
    for (size_t l = 0; l < kNumLabels; ++l) {
      g[start + l] += post[0][l];
      g[end + l] += post[n - 1][l];
    }
    g[start + LabelIndex(inst.labels[0])] -= 1.0;
    g[end + LabelIndex(inst.labels[n - 1])] -= 1.0;

    for (size_t t = 1; t < n; ++t) {
      for (size_t i = 0; i < kNumLabels; ++i) {
        for (size_t j = 0; j < kNumLabels; ++j) {
          double tr = model.transition(i, j);
          if (tr == kNegInf) continue;
          g[trans + i * kNumLabels + j] += std::exp(
              lat.alpha[t - 1][i] + tr + lat.unary[t][j] + lat.beta[t][j] - lat.log_z);
        }
      }
      g[trans + LabelIndex(inst.labels[t - 1]) * kNumLabels + LabelIndex(inst.labels[t])] -=
          1.0;
    }
  }

  if (l2 > 0.0) {
    std::span<const double> w = model.params();
    double sq = 0.0;
    for (size_t p = 0; p < w.size(); ++p) {
      sq += w[p] * w[p];
      g[p] += l2 * w[p];
    }
    out.loss += 0.5 * l2 * sq;
  }
  return out;
}

double span_confidence(const DecodeResult &decode, size_t begin, size_t end) {
  if (begin >= end || end > decode.path.size() || end > decode.marginals.size()) {
    throw std::out_of_range("span outside decoded sentence");
  }
  double sum = 0.0;
  for (size_t t = begin; t < end; ++t) {
    sum += decode.marginals[t][LabelIndex(decode.path[t])];
  }
  return sum / static_cast<double>(end - begin);
}

std::string SerializeModel(const CrfModel &model) {
  auto w = model.params();
  json transitions = json::array();
  for (size_t i = 0; i < kNumLabels; ++i) {
    json row = json::array();
    for (size_t j = 0; j < kNumLabels; ++j) {
      size_t p = model.TransitionOffset() + i * kNumLabels + j;
      row.push_back(model.IsLearnable(p) ? json(w[p]) : json(nullptr));
    }
    transitions.push_back(std::move(row));
  }
  json start = json::array();
  json end = json::array();
  for (size_t l = 0; l < kNumLabels; ++l) {
    size_t p = model.StartOffset() + l;
    start.push_back(model.IsLearnable(p) ? json(w[p]) : json(nullptr));
    end.push_back(w[model.EndOffset() + l]);
  }
  const ModelMetadata &meta = model.metadata();
  json metadata = {
      {"learning_rate", meta.config.learning_rate},
      {"batch_size", meta.config.batch_size},
      {"epochs", meta.config.epochs},
      {"l2", meta.config.l2},
      {"seed", meta.config.seed},
      {"best_epoch", meta.best_epoch},
      {"val_f1", meta.val_f1},
      {"entity_class",
       meta.entity_class ? json(std::string(ClassName(*meta.entity_class))) : json(nullptr)},
  };
  json j = {
      {"format", kFormatName},
      {"version", kFormatVersion},
      {"labels", {LabelName(kB), LabelName(kI), LabelName(kO)}},
      {"featurizer", meta.featurizer},
      {"features", model.feature_names()},
      {"emission", std::vector<double>(w.begin(), w.begin() + model.TransitionOffset())},
      {"transitions", std::move(transitions)},
      {"start", std::move(start)},
      {"end", std::move(end)},
      {"metadata", std::move(metadata)},
  };
  return j.dump();
}

CrfModel DeserializeModel(const std::string &text, const std::string &source) {
  try {
    json j = json::parse(text);
    if (j.at("format").get<std::string>() != kFormatName) {
      throw DataError(source + ": not a clinex CRF model");
    }
    int version = j.at("version").get<int>();
    if (version != kFormatVersion) {
      throw DataError(source + ": unsupported model version " + std::to_string(version));
    }
    if (j.at("labels") != json({"B", "I", "O"})) {
      throw DataError(source + ": unexpected label set");
    }
    CrfModel model(j.at("features").get<std::vector<std::string>>());
    auto emission = j.at("emission").get<std::vector<double>>();
    if (emission.size() != model.TransitionOffset()) {
      throw DataError(source + ": emission table size mismatch");
    }
    std::span<double> w = model.params();
    std::copy(emission.begin(), emission.end(), w.begin());
    const json &transitions = j.at("transitions");
    for (size_t i = 0; i < kNumLabels; ++i) {
      for (size_t k = 0; k < kNumLabels; ++k) {
        size_t p = model.TransitionOffset() + i * kNumLabels + k;
        if (model.IsLearnable(p)) w[p] = transitions.at(i).at(k).get<double>();
      }
    }
    for (size_t l = 0; l < kNumLabels; ++l) {
      size_t p = model.StartOffset() + l;
      if (model.IsLearnable(p)) w[p] = j.at("start").at(l).get<double>();
      w[model.EndOffset() + l] = j.at("end").at(l).get<double>();
    }
    for (double v : w) {
      if (!std::isfinite(v)) throw DataError(source + ": non-finite weight");
    }
    const json &meta = j.at("metadata");
    ModelMetadata &m = model.metadata();
    m.featurizer = j.at("featurizer").get<std::string>();
    m.config.learning_rate = meta.at("learning_rate").get<double>();
    m.config.batch_size = meta.at("batch_size").get<size_t>();
    m.config.epochs = meta.at("epochs").get<size_t>();
    m.config.l2 = meta.at("l2").get<double>();
    m.config.seed = meta.at("seed").get<uint64_t>();
    m.best_epoch = meta.at("best_epoch").get<size_t>();
    m.val_f1 = meta.at("val_f1").get<double>();
    if (!meta.at("entity_class").is_null()) {
      m.entity_class = ParseClass(meta.at("entity_class").get<std::string>());
      if (!m.entity_class) throw DataError(source + ": unknown entity class");
    }
    return model;
  } catch (const json::exception &e) {
    throw DataError(source + ": malformed model file: " + e.what());
  }
}

void SaveModel(const CrfModel &model, const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out << SerializeModel(model) << '\n';
  if (!out) throw DataError("write failed for " + path);
}

CrfModel LoadModel(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return DeserializeModel(buffer.str(), path);
}

}  // namespace clinex
