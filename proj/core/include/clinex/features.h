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

#ifndef CLINEX_FEATURES_H_
#define CLINEX_FEATURES_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace clinex {

// Token representation seen by the sequence tagger: string-keyed features
// per position. Implementations must be deterministic.
class TokenFeaturizer {
 public:
  virtual ~TokenFeaturizer() = default;

  // Stored in model files; a model only decodes with the featurizer that
  // trained it.
  virtual std::string name() const = 0;

  virtual std::vector<std::string> Extract(const std::vector<std::string> &tokens,
                                           size_t position) const = 0;
};

// Lowercased word, word shape, prefixes and suffixes of 1-3 code points,
// digit and punctuation flags, for offsets -2..+2, plus a bias feature.
// Offsets outside the sentence emit one sentinel feature each.
class TemplateFeaturizer : public TokenFeaturizer {
 public:
  static constexpr std::string_view kName = "template-v1";

  std::string name() const override { return std::string(kName); }
  std::vector<std::string> Extract(const std::vector<std::string> &tokens,
                                   size_t position) const override;
};

// Uppercase -> 'A', lowercase -> 'a', digit -> 'd', anything else kept:
// "HTA" -> "AAA", "120/80" -> "ddd/dd".
std::string WordShape(std::string_view token);

// TemplateFeaturizer applied at one position.
std::vector<std::string> extract_features(const std::vector<std::string> &tokens,
                                          size_t position);

}  // namespace clinex

#endif  // CLINEX_FEATURES_H_
