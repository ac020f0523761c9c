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

#include "clinex/config.h"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "clinex/error.h"

namespace clinex {

namespace pt = boost::property_tree;

const std::vector<std::string> &ConfigKeys() {
  static const std::vector<std::string> keys = {
      "general.seed",         "general.language",   "paths.kb",
      "paths.glossary",       "paths.semantic_groups", "matcher.n",
      "matcher.measure",      "matcher.alpha",      "matcher.max_window",
      "matcher.overlap",
      "train.learning_rate",  "train.batch_size",   "train.epochs",
      "train.l2",             "search.k",           "search.threads",
      "link.threshold",       "link.measure"};
  return keys;
}

std::pair<std::string, std::string> ParseOverride(const std::string &text) {
  size_t eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw DataError("override '" + text + "' is not section.key=value");
  }
  return {text.substr(0, eq), text.substr(eq + 1)};
}

namespace {

template <typename T>
T Get(const pt::ptree &tree, const std::string &key, T fallback) {
  auto node = tree.get_optional<std::string>(key);
  if (!node) return fallback;
  std::istringstream in(*node);
  T value;
  if (!(in >> value) || !(in >> std::ws).eof()) {
    throw DataError("config " + key + ": bad value '" + *node + "'");
  }
  return value;
}

template <>
std::string Get<std::string>(const pt::ptree &tree, const std::string &key,
                             std::string fallback) {
  return tree.get<std::string>(key, fallback);
}

Similarity GetMeasure(const pt::ptree &tree, const std::string &key, Similarity fallback) {
  auto node = tree.get_optional<std::string>(key);
  if (!node) return fallback;
  auto m = ParseSimilarity(*node);
  if (!m) throw DataError("config " + key + ": unknown measure '" + *node + "'");
  return *m;
}

OverlapCriterion GetOverlap(const pt::ptree &tree, const std::string &key,
                            OverlapCriterion fallback) {
  auto node = tree.get_optional<std::string>(key);
  if (!node) return fallback;
  auto c = ParseOverlap(*node);
  if (!c) throw DataError("config " + key + ": expected score or length, got '" + *node + "'");
  return *c;
}

void RequireFile(const std::string &key, const std::string &path) {
  if (!path.empty() && !std::filesystem::exists(path)) {
    throw DataError("config " + key + ": no such file " + path);
  }
}

}  // namespace

PipelineConfig ResolveConfig(const std::optional<std::string> &path,
                             const std::vector<std::pair<std::string, std::string>> &overrides) {
  pt::ptree tree;
  if (path) {
    try {
      pt::read_ini(*path, tree);
    } catch (const pt::ini_parser_error &e) {
      throw DataError(std::string("config: ") + e.what());
    }
  }
  const auto &keys = ConfigKeys();
  for (const auto &[section, children] : tree) {
    for (const auto &[key, value] : children) {
      std::string full = section + "." + key;
      if (std::find(keys.begin(), keys.end(), full) == keys.end()) {
        throw DataError("config: unknown key " + full);
      }
    }
    if (children.empty()) throw DataError("config: key outside a section: " + section);
  }
  for (const auto &[key, value] : overrides) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw DataError("config: unknown key " + key);
    }
    tree.put(key, value);
  }

  PipelineConfig c;
  c.seed = Get<uint64_t>(tree, "general.seed", c.seed);
  c.language = Get<std::string>(tree, "general.language", c.language);
  c.kb_path = Get<std::string>(tree, "paths.kb", c.kb_path);
  c.glossary_path = Get<std::string>(tree, "paths.glossary", c.glossary_path);
  c.semantic_groups_path =
      Get<std::string>(tree, "paths.semantic_groups", c.semantic_groups_path);
  c.matcher.n = Get<int>(tree, "matcher.n", c.matcher.n);
  c.matcher.measure = GetMeasure(tree, "matcher.measure", c.matcher.measure);
  c.matcher.alpha = Get<double>(tree, "matcher.alpha", c.matcher.alpha);
  c.matcher.max_window = Get<int>(tree, "matcher.max_window", c.matcher.max_window);
  c.matcher.overlap = GetOverlap(tree, "matcher.overlap", c.matcher.overlap);
  c.train.learning_rate = Get<double>(tree, "train.learning_rate", c.train.learning_rate);
  c.train.batch_size = Get<size_t>(tree, "train.batch_size", c.train.batch_size);
  c.train.epochs = Get<size_t>(tree, "train.epochs", c.train.epochs);
  c.train.l2 = Get<double>(tree, "train.l2", c.train.l2);
  c.search_k = Get<size_t>(tree, "search.k", c.search_k);
  c.search_threads = Get<size_t>(tree, "search.threads", c.search_threads);
  c.link.threshold = Get<double>(tree, "link.threshold", c.link.threshold);
  c.link.measure = GetMeasure(tree, "link.measure", c.link.measure);
  c.train.seed = c.seed;

  try {
    c.matcher.Validate();
    c.train.Validate();
    c.link.Validate();
  } catch (const std::invalid_argument &e) {
    throw DataError(std::string("config: ") + e.what());
  }
  if (c.search_k == 0) throw DataError("config: search.k must be >= 1");
  RequireFile("paths.kb", c.kb_path);
  RequireFile("paths.glossary", c.glossary_path);
  RequireFile("paths.semantic_groups", c.semantic_groups_path);
  return c;
}

namespace {

// Shortest text that reads back to the same double.
std::string Num(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

}  // namespace

std::string RenderConfig(const PipelineConfig &c) {
  std::ostringstream out;
  out << "[general]\nseed = " << c.seed << "\nlanguage = " << c.language << "\n\n"
      << "[paths]\nkb = " << c.kb_path << "\nglossary = " << c.glossary_path
      << "\nsemantic_groups = " << c.semantic_groups_path << "\n\n"
      << "[matcher]\nn = " << c.matcher.n << "\nmeasure = " << SimilarityName(c.matcher.measure)
      << "\nalpha = " << Num(c.matcher.alpha) << "\nmax_window = " << c.matcher.max_window
      << "\noverlap = " << OverlapName(c.matcher.overlap) << "\n\n"
      << "[train]\nlearning_rate = " << Num(c.train.learning_rate)
      << "\nbatch_size = " << c.train.batch_size << "\nepochs = " << c.train.epochs
      << "\nl2 = " << Num(c.train.l2) << "\n\n"
      << "[search]\nk = " << c.search_k << "\nthreads = " << c.search_threads << "\n\n"
      << "[link]\nthreshold = " << Num(c.link.threshold)
      << "\nmeasure = " << SimilarityName(c.link.measure) << "\n";
  return out.str();
}

}  // namespace clinex
