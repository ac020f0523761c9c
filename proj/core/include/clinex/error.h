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

#ifndef CLINEX_ERROR_H_
#define CLINEX_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace clinex {

// Malformed input data: bad file rows, invalid tag sequences, inconsistent
// corpora. The command line tool maps these to exit status 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// DataError raised while reading a line-oriented file.
class ParseError : public DataError {
 public:
  ParseError(const std::string &source, size_t line, const std::string &what)
      : DataError(source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  size_t line() const { return line_; }

 private:
  size_t line_;
};

}  // namespace clinex

#endif  // CLINEX_ERROR_H_
