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

// Curation of dictionary annotations into a tagged corpus.
//
// A session holds one item per annotated sentence with at least one
// candidate. Annotators lease batches of items, accept or reject
// candidates, add missed mentions and retract earlier decisions. Every
// accepted decision bumps the item version and is appended to the decision
// log; a decision whose base version is not the item's current version is
// refused. Replaying the log rebuilds the session exactly.
//
// Log format (JSON-lines): the first record is
//   {"type":"create","session":..,"sentences":[<annotation records>]}
// and every following record is a decision
//   {"type":"decision","item":..,"action":..,"candidate":..,"addition":..,
//    "start":..,"end":..,"class":..,"annotator":..,"timestamp":..,
//    "base_version":..}

#ifndef CLINEX_CURATION_H_
#define CLINEX_CURATION_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clinex/annotation.h"
#include "clinex/corpus.h"
#include "clinex/error.h"
#include "clinex/kb.h"
#include "clinex/textprep.h"

namespace clinex {

enum class CandidateStatus { kPending, kAccepted, kRejected };
enum class Action { kAccept, kReject, kAdd, kRetract };

std::string_view StatusName(CandidateStatus s);
std::string_view ActionName(Action a);
std::optional<Action> ParseAction(std::string_view name);

struct CurationCandidate {
  size_t id = 0;
  AnnotatedMatch match;
  CandidateStatus status = CandidateStatus::kPending;
  std::string decided_by;

  bool operator==(const CurationCandidate &) const = default;
};

struct Addition {
  size_t id = 0;
  Span span;
  EntityClass cls = EntityClass::kDisease;
  std::string annotator;
  bool retracted = false;

  bool operator==(const Addition &) const = default;
};

struct CurationItem {
  size_t id = 0;
  std::string doc_id;
  size_t sentence_index = 0;
  std::string text;
  std::vector<CurationCandidate> candidates;
  std::vector<Addition> additions;
  uint64_t version = 0;
  size_t conflicts = 0;
  // Leases are not part of the persisted state.
  std::string leased_to;
  int64_t lease_expiry_ms = 0;

  bool HasPending() const;
  // Accepted candidates and live additions.
  std::vector<Mention> Mentions() const;
};

struct DecisionRecord {
  size_t item_id = 0;
  Action action = Action::kAccept;
  std::optional<size_t> candidate_id;
  std::optional<size_t> addition_id;
  std::optional<Span> span;           // add
  std::optional<EntityClass> cls;     // add
  std::string annotator;
  int64_t timestamp_ms = 0;
  uint64_t base_version = 0;

  bool operator==(const DecisionRecord &) const = default;
};

// Refused request. `code` is one of not_found, stale_version, overlap,
// unknown_candidate, invalid_request.
class CurationError : public DataError {
 public:
  CurationError(std::string code, const std::string &message,
                std::optional<uint64_t> current_version = std::nullopt)
      : DataError(message), code_(std::move(code)), current_version_(current_version) {}
  const std::string &code() const { return code_; }
  std::optional<uint64_t> current_version() const { return current_version_; }

 private:
  std::string code_;
  std::optional<uint64_t> current_version_;
};

struct Progress {
  size_t items = 0;
  size_t items_pending = 0;
  size_t pending = 0;
  size_t accepted = 0;
  size_t rejected = 0;
  size_t additions = 0;
  size_t decisions = 0;
  size_t conflicts = 0;
};

struct ExportResult {
  Corpus aggregated;                       // typed
  std::map<EntityClass, Corpus> per_class;  // untyped
  size_t pending_as_rejected = 0;
  std::vector<std::string> warnings;
};

// Single-threaded session state.
class Session {
 public:
  // Throws DataError for an empty input.
  static Session Create(std::string id, const std::vector<AnnotatedSentence> &sentences);
  // Inverse of SnapshotJson.
  static Session FromSnapshot(std::string_view json, const std::string &source);

  const std::string &id() const { return id_; }
  const std::vector<CurationItem> &items() const { return items_; }
  const CurationItem &item(size_t id) const;
  const std::vector<DecisionRecord> &log() const { return log_; }
  const std::vector<AnnotatedSentence> &sentences() const { return sentences_; }

  // Up to k items with a pending candidate that are not leased to someone
  // else, leased to `annotator` until now + ttl.
  std::vector<CurationItem> NextBatch(const std::string &annotator, size_t k, int64_t now_ms,
                                      int64_t ttl_ms);

  // Applies and logs the decision; returns the new item version. Throws
  // CurationError without changing state.
  uint64_t Decide(const DecisionRecord &record);

  Progress GetProgress() const;

  // Pending candidates count as rejected. Deterministic given the log.
  ExportResult Export() const;

 private:
  friend std::string SnapshotJson(const Session &session);

  std::string id_;
  std::vector<AnnotatedSentence> sentences_;
  std::vector<CurationItem> items_;
  std::vector<DecisionRecord> log_;
};

std::string DecisionToJsonLine(const DecisionRecord &record);
DecisionRecord DecisionFromJson(std::string_view line, const std::string &source,
                                size_t line_no);

// Writes the create record and every decision.
void WriteLog(const Session &session, std::ostream &out);
// Rebuilds a session from a log.
Session ReplayLog(std::istream &in, const std::string &source);

// Full state: id, input sentences, item states and the decisions applied.
// Recovery loads the snapshot and replays the log records past it.
std::string SnapshotJson(const Session &session);

// CoNLL text of an export, aggregated and one per class keyed by slug.
std::map<std::string, std::string> RenderExport(const ExportResult &result);

struct ServiceOptions {
  // Logs, snapshots and exports go here when set; existing sessions are
  // restored from it.
  std::optional<std::string> state_dir;
  int64_t lease_ttl_ms = 15 * 60 * 1000;
  size_t snapshot_every = 100;
  std::function<int64_t()> clock;  // milliseconds; wall clock when empty
  const Glossary *glossary = nullptr;  // expansion hints on items
};

struct HttpReply {
  int status = 200;
  std::string body;  // JSON
};

// Thread-safe set of sessions behind the JSON API:
//   POST /sessions                    {"sentences":[...]} or {"path":..}
//   GET  /sessions/{id}/batch?annotator=&k=
//   POST /sessions/{id}/decisions     decision object
//   GET  /sessions/{id}/progress
//   POST /sessions/{id}/export
// Errors reply {"code","message"[,"current_version"]}.
class CurationService {
 public:
  explicit CurationService(ServiceOptions options = {});
  ~CurationService();

  std::string CreateSession(const std::vector<AnnotatedSentence> &sentences);
  std::vector<CurationItem> NextBatch(const std::string &session, const std::string &annotator,
                                      size_t k);
  // Stamps the timestamp, applies and persists.
  uint64_t Decide(const std::string &session, DecisionRecord record);
  Progress GetProgress(const std::string &session);
  ExportResult Export(const std::string &session);
  CurationItem Item(const std::string &session, size_t item);

  std::vector<std::string> SessionIds() const;

  HttpReply Handle(std::string_view method, std::string_view path,
                   const std::map<std::string, std::string> &query, std::string_view body);

  // Item as served to clients.
  std::string ItemJson(const CurationItem &item) const;

 private:
  struct Entry;
  Entry &Find(const std::string &session);
  int64_t Now() const;
  void Restore();

  ServiceOptions options_;
  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<Entry>> sessions_;
  size_t next_id_ = 1;
};

}  // namespace clinex

#endif  // CLINEX_CURATION_H_
