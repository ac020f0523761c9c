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

// HTTP front end of a CurationService.

#ifndef CLINEX_CURATION_SERVER_H_
#define CLINEX_CURATION_SERVER_H_

#include <memory>
#include <optional>
#include <string>

#include "clinex/curation.h"

namespace clinex {

class CurationHttpServer {
 public:
  // `static_dir`, when set, is served at "/" (the built curation UI).
  explicit CurationHttpServer(CurationService &service,
                              std::optional<std::string> static_dir = std::nullopt);
  ~CurationHttpServer();

  CurationHttpServer(const CurationHttpServer &) = delete;
  CurationHttpServer &operator=(const CurationHttpServer &) = delete;

  // Port 0 picks a free port. Returns the bound port; throws on failure.
  int Bind(const std::string &host, int port);
  // Serves until Stop(). Blocking.
  void Listen();
  // Listen() on a background thread.
  void Start();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace clinex

#endif  // CLINEX_CURATION_SERVER_H_
