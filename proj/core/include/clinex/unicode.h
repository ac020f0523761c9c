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

// UTF-8 helpers backed by ICU. All offsets in clinex are byte offsets into
// NFKC-normalized UTF-8 text.

#ifndef CLINEX_UNICODE_H_
#define CLINEX_UNICODE_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace clinex {

// NFKC normalization. Invalid UTF-8 sequences are replaced by U+FFFD.
std::string Nfkc(std::string_view text);

// NFKC followed by full lowercasing under the root locale, with runs of
// whitespace collapsed to one space and the ends trimmed. This is the key
// under which dictionary terms and query windows are compared.
std::string Fold(std::string_view text);

// Lowercase only (no normalization, no whitespace handling).
std::string Lower(std::string_view text);

// Splits text into code points, each returned as its UTF-8 byte string.
std::vector<std::string> CodePoints(std::string_view text);

// Decodes the code point starting at byte offset `pos` and advances `pos`.
char32_t NextCodePoint(std::string_view text, size_t &pos);

bool IsSpace(char32_t c);
bool IsPunct(char32_t c);
bool IsDigit(char32_t c);
bool IsUpper(char32_t c);
bool IsLower(char32_t c);
bool IsAlpha(char32_t c);

// True if the text is non-empty and every code point is punctuation.
bool IsPunctuation(std::string_view text);

// Trims leading and trailing whitespace (Unicode aware).
std::string_view Trim(std::string_view text);

// Trims and collapses internal whitespace runs to a single ASCII space.
std::string CollapseWhitespace(std::string_view text);

}  // namespace clinex

#endif  // CLINEX_UNICODE_H_
