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

#include "clinex/features.h"

#include <stdexcept>

#include "clinex/unicode.h"

namespace clinex {

namespace {

std::string OffsetTag(int offset) {
  if (offset > 0) return "[+" + std::to_string(offset) + "]";
  return "[" + std::to_string(offset) + "]";
}

bool AllDigits(std::string_view token) {
  if (token.empty()) return false;
  size_t pos = 0;
  while (pos < token.size()) {
    if (!IsDigit(NextCodePoint(token, pos))) return false;
  }
  return true;
}

}  // namespace

std::string WordShape(std::string_view token) {
  std::string shape;
  size_t pos = 0;
  while (pos < token.size()) {
    size_t start = pos;
    char32_t c = NextCodePoint(token, pos);
    if (IsDigit(c)) {
      shape.push_back('d');
    } else if (IsUpper(c)) {
      shape.push_back('A');
    } else if (IsLower(c) || IsAlpha(c)) {
      shape.push_back('a');
    } else {
      shape.append(token.substr(start, pos - start));
    }
  }
  return shape;
}

std::vector<std::string> TemplateFeaturizer::Extract(
    const std::vector<std::string> &tokens, size_t position) const {
  if (position >= tokens.size()) throw std::out_of_range("feature position");
  std::vector<std::string> out;
  out.reserve(48);
  out.emplace_back("bias");
  for (int offset = -2; offset <= 2; ++offset) {
    const std::string tag = OffsetTag(offset);
    long p = static_cast<long>(position) + offset;
    if (p < 0) {
      out.push_back("w" + tag + "=<s>");
      continue;
    }
    if (p >= static_cast<long>(tokens.size())) {
      out.push_back("w" + tag + "=</s>");
      continue;
    }
    const std::string &token = tokens[static_cast<size_t>(p)];
    out.push_back("w" + tag + "=" + Lower(token));
    out.push_back("shape" + tag + "=" + WordShape(token));
    std::vector<std::string> cps = CodePoints(Lower(token));
    std::string prefix;
    std::string suffix;
    for (size_t k = 1; k <= 3 && k <= cps.size(); ++k) {
      prefix += cps[k - 1];
      suffix = cps[cps.size() - k] + suffix;
      out.push_back("p" + std::to_string(k) + tag + "=" + prefix);
      out.push_back("s" + std::to_string(k) + tag + "=" + suffix);
    }
    if (AllDigits(token)) out.push_back("digit" + tag);
    if (IsPunctuation(token)) out.push_back("punct" + tag);
  }
  return out;
}

std::vector<std::string> extract_features(const std::vector<std::string> &tokens,
                                          size_t position) {
  return TemplateFeaturizer().Extract(tokens, position);
}

}  // namespace clinex
