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

#include "clinex/curation.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "clinex/unicode.h"
#include "json.hpp"

namespace clinex {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string_view StatusName(CandidateStatus s) {
  switch (s) {
    case CandidateStatus::kPending: return "pending";
    case CandidateStatus::kAccepted: return "accepted";
    case CandidateStatus::kRejected: return "rejected";
  }
  return "";
}

std::string_view ActionName(Action a) {
  switch (a) {
    case Action::kAccept: return "accept";
    case Action::kReject: return "reject";
    case Action::kAdd: return "add";
    case Action::kRetract: return "retract";
  }
  return "";
}

std::optional<Action> ParseAction(std::string_view name) {
  for (Action a : {Action::kAccept, Action::kReject, Action::kAdd, Action::kRetract}) {
    if (ActionName(a) == name) return a;
  }
  return std::nullopt;
}

namespace {

std::optional<CandidateStatus> ParseStatus(std::string_view name) {
  for (auto s : {CandidateStatus::kPending, CandidateStatus::kAccepted,
                 CandidateStatus::kRejected}) {
    if (StatusName(s) == name) return s;
  }
  return std::nullopt;
}

// Span widened to the tokens it touches; nullopt if it touches none.
std::optional<Span> Widen(const std::vector<Token> &tokens, Span span) {
  std::optional<Span> out;
  for (const Token &t : tokens) {
    if (t.span.end <= span.start || t.span.start >= span.end) continue;
    if (!out) out = t.span;
    out->end = t.span.end;
  }
  return out;
}

json AnnotationObject(const AnnotatedSentence &s) { return json::parse(ToJsonLine(s)); }

}  // namespace

bool CurationItem::HasPending() const {
  return std::any_of(candidates.begin(), candidates.end(), [](const CurationCandidate &c) {
    return c.status == CandidateStatus::kPending;
  });
}

std::vector<Mention> CurationItem::Mentions() const {
  std::vector<Mention> out;
  for (const auto &c : candidates) {
    if (c.status == CandidateStatus::kAccepted) out.push_back({c.match.span, c.match.cls});
  }
  for (const auto &a : additions) {
    if (!a.retracted) out.push_back({a.span, a.cls});
  }
  std::sort(out.begin(), out.end());
  return out;
}

Session Session::Create(std::string id, const std::vector<AnnotatedSentence> &sentences) {
  if (sentences.empty()) throw DataError("annotation input is empty");
  Session s;
  s.id_ = std::move(id);
  s.sentences_ = sentences;
  for (const auto &a : sentences) {
    if (a.matches.empty()) continue;
    CurationItem item;
    item.id = s.items_.size();
    item.doc_id = a.doc_id;
    item.sentence_index = a.sentence_index;
    item.text = a.text;
    for (const auto &m : a.matches) {
      item.candidates.push_back({item.candidates.size(), m, CandidateStatus::kPending, ""});
    }
    s.items_.push_back(std::move(item));
  }
  return s;
}

const CurationItem &Session::item(size_t id) const {
  if (id >= items_.size()) {
    throw CurationError("not_found", "no item " + std::to_string(id) + " in session " + id_);
  }
  return items_[id];
}

std::vector<CurationItem> Session::NextBatch(const std::string &annotator, size_t k,
                                             int64_t now_ms, int64_t ttl_ms) {
  std::vector<CurationItem> out;
  for (auto &item : items_) {
    if (out.size() >= k) break;
    if (!item.HasPending()) continue;
    bool free = item.leased_to.empty() || item.leased_to == annotator ||
                item.lease_expiry_ms <= now_ms;
    if (!free) continue;
    item.leased_to = annotator;
    item.lease_expiry_ms = now_ms + ttl_ms;
    out.push_back(item);
  }
  return out;
}

uint64_t Session::Decide(const DecisionRecord &r) {
  if (r.item_id >= items_.size()) {
    throw CurationError("not_found", "no item " + std::to_string(r.item_id));
  }
  CurationItem &it = items_[r.item_id];
  if (r.base_version != it.version) {
    throw CurationError("stale_version",
                        "item " + std::to_string(it.id) + " is at version " +
                            std::to_string(it.version) + ", decision was based on " +
                            std::to_string(r.base_version),
                        it.version);
  }
  if (r.annotator.empty()) throw CurationError("invalid_request", "annotator is required");

  std::vector<Token> tokens = Tokenize(it.text);
  // Widened spans of the live mentions, skipping one candidate.
  auto live = [&](std::optional<size_t> skip_candidate) {
    std::vector<Span> spans;
    for (const auto &c : it.candidates) {
      if (c.status != CandidateStatus::kAccepted || c.id == skip_candidate) continue;
      if (auto w = Widen(tokens, c.match.span)) spans.push_back(*w);
    }
    for (const auto &a : it.additions) {
      if (!a.retracted) {
        if (auto w = Widen(tokens, a.span)) spans.push_back(*w);
      }
    }
    return spans;
  };
  auto check_free = [&](Span span, std::optional<size_t> skip) {
    auto w = Widen(tokens, span);
    if (!w) throw CurationError("invalid_request", "span covers no token");
    for (const Span &o : live(skip)) {
      if (o.Overlaps(*w)) {
        throw CurationError("overlap", "span [" + std::to_string(span.start) + "," +
                                           std::to_string(span.end) +
                                           ") overlaps an accepted mention");
      }
    }
  };
  auto candidate = [&]() -> CurationCandidate & {
    if (!r.candidate_id) throw CurationError("invalid_request", "candidate_id is required");
    if (*r.candidate_id >= it.candidates.size()) {
      throw CurationError("unknown_candidate",
                          "no candidate " + std::to_string(*r.candidate_id) + " in item " +
                              std::to_string(it.id));
    }
    return it.candidates[*r.candidate_id];
  };
  auto set_status = [&](CurationCandidate &c, CandidateStatus status) {
    if (!c.decided_by.empty() && c.decided_by != r.annotator && c.status != status) {
      ++it.conflicts;
    }
    c.status = status;
    c.decided_by = status == CandidateStatus::kPending ? "" : r.annotator;
  };

  switch (r.action) {
    case Action::kAccept: {
      CurationCandidate &c = candidate();
      check_free(c.match.span, c.id);
      set_status(c, CandidateStatus::kAccepted);
      break;
    }
    case Action::kReject:
      set_status(candidate(), CandidateStatus::kRejected);
      break;
    case Action::kAdd: {
      if (!r.span || !r.cls) throw CurationError("invalid_request", "add needs span and class");
      if (r.span->empty() || r.span->end > it.text.size()) {
        throw CurationError("invalid_request", "span out of bounds");
      }
      check_free(*r.span, std::nullopt);
      it.additions.push_back({it.additions.size(), *r.span, *r.cls, r.annotator, false});
      break;
    }
    case Action::kRetract:
      if (r.candidate_id.has_value() == r.addition_id.has_value()) {
        throw CurationError("invalid_request",
                            "retract needs exactly one of candidate_id and addition_id");
      }
      if (r.candidate_id) {
        set_status(candidate(), CandidateStatus::kPending);
      } else {
        if (*r.addition_id >= it.additions.size() || it.additions[*r.addition_id].retracted) {
          throw CurationError("unknown_candidate",
                              "no live addition " + std::to_string(*r.addition_id));
        }
        Addition &a = it.additions[*r.addition_id];
        if (a.annotator != r.annotator) ++it.conflicts;
        a.retracted = true;
      }
      break;
  }
  ++it.version;
  log_.push_back(r);
  return it.version;
}

Progress Session::GetProgress() const {
  Progress p;
  p.items = items_.size();
  p.decisions = log_.size();
  for (const auto &it : items_) {
    p.items_pending += it.HasPending();
    p.conflicts += it.conflicts;
    for (const auto &c : it.candidates) {
      switch (c.status) {
        case CandidateStatus::kPending: ++p.pending; break;
        case CandidateStatus::kAccepted: ++p.accepted; break;
        case CandidateStatus::kRejected: ++p.rejected; break;
      }
    }
    for (const auto &a : it.additions) p.additions += !a.retracted;
  }
  return p;
}

ExportResult Session::Export() const {
  ExportResult out;
  for (const auto &it : items_) {
    for (const auto &c : it.candidates) {
      out.pending_as_rejected += c.status == CandidateStatus::kPending;
    }
    std::vector<Mention> mentions = it.Mentions();
    if (mentions.empty()) continue;
    Sentence s{it.doc_id, it.sentence_index, it.text, Span{0, it.text.size()}};
    out.aggregated.push_back(to_iob(s, mentions, &out.warnings));
  }
  for (EntityClass c : kEntityClasses) out.per_class[c] = ClassSubcorpus(out.aggregated, c);
  if (out.pending_as_rejected > 0) {
    out.warnings.push_back(std::to_string(out.pending_as_rejected) +
                           " pending candidates treated as rejected");
  }
  return out;
}

std::string DecisionToJsonLine(const DecisionRecord &r) {
  json j = {{"type", "decision"},
            {"item", r.item_id},
            {"action", std::string(ActionName(r.action))},
            {"annotator", r.annotator},
            {"timestamp", r.timestamp_ms},
            {"base_version", r.base_version}};
  if (r.candidate_id) j["candidate"] = *r.candidate_id;
  if (r.addition_id) j["addition"] = *r.addition_id;
  if (r.span) {
    j["start"] = r.span->start;
    j["end"] = r.span->end;
  }
  if (r.cls) j["class"] = std::string(ClassName(*r.cls));
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

namespace {

DecisionRecord DecisionFromObject(const json &j) {
  DecisionRecord r;
  r.item_id = j.at("item").get<size_t>();
  auto action = ParseAction(j.at("action").get<std::string>());
  if (!action) throw DataError("unknown action '" + j.at("action").get<std::string>() + "'");
  r.action = *action;
  r.annotator = j.at("annotator").get<std::string>();
  r.timestamp_ms = j.value("timestamp", int64_t{0});
  r.base_version = j.at("base_version").get<uint64_t>();
  if (j.contains("candidate") && !j["candidate"].is_null()) {
    r.candidate_id = j["candidate"].get<size_t>();
  }
  if (j.contains("addition") && !j["addition"].is_null()) {
    r.addition_id = j["addition"].get<size_t>();
  }
  if (j.contains("start") || j.contains("end")) {
    r.span = Span{j.at("start").get<size_t>(), j.at("end").get<size_t>()};
  }
  if (j.contains("class") && !j["class"].is_null()) {
    auto cls = ParseClass(j["class"].get<std::string>());
    if (!cls) throw DataError("unknown class '" + j["class"].get<std::string>() + "'");
    r.cls = *cls;
  }
  return r;
}

std::vector<AnnotatedSentence> SentencesFromArray(const json &arr, const std::string &source) {
  std::vector<AnnotatedSentence> out;
  size_t i = 0;
  for (const auto &s : arr) out.push_back(ParseAnnotationLine(s.dump(), source, ++i));
  return out;
}

}  // namespace

DecisionRecord DecisionFromJson(std::string_view line, const std::string &source,
                                size_t line_no) {
  try {
    return DecisionFromObject(json::parse(line));
  } catch (const json::exception &e) {
    throw ParseError(source, line_no, std::string("malformed decision: ") + e.what());
  } catch (const ParseError &) {
    throw;
  } catch (const DataError &e) {
    throw ParseError(source, line_no, e.what());
  }
}

namespace {

std::string CreateRecord(const Session &session) {
  json sentences = json::array();
  for (const auto &s : session.sentences()) sentences.push_back(AnnotationObject(s));
  json j = {{"type", "create"}, {"session", session.id()}, {"sentences", std::move(sentences)}};
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

struct ParsedLog {
  std::string id;
  std::vector<AnnotatedSentence> sentences;
  std::vector<DecisionRecord> decisions;
};

ParsedLog ParseLog(std::istream &in, const std::string &source) {
  ParsedLog out;
  std::string line;
  size_t line_no = 0;
  bool created = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    if (!created) {
      try {
        json j = json::parse(line);
        if (j.at("type") != "create") throw ParseError(source, line_no, "expected create record");
        out.id = j.at("session").get<std::string>();
        out.sentences = SentencesFromArray(j.at("sentences"), source);
      } catch (const json::exception &e) {
        throw ParseError(source, line_no, std::string("malformed create record: ") + e.what());
      }
      created = true;
      continue;
    }
    out.decisions.push_back(DecisionFromJson(line, source, line_no));
  }
  if (!created) throw DataError(source + ": empty decision log");
  return out;
}

}  // namespace

void WriteLog(const Session &session, std::ostream &out) {
  out << CreateRecord(session) << '\n';
  for (const auto &r : session.log()) out << DecisionToJsonLine(r) << '\n';
}

Session ReplayLog(std::istream &in, const std::string &source) {
  ParsedLog parsed = ParseLog(in, source);
  Session s = Session::Create(parsed.id, parsed.sentences);
  for (const auto &r : parsed.decisions) s.Decide(r);
  return s;
}

std::string SnapshotJson(const Session &session) {
  json sentences = json::array();
  for (const auto &s : session.sentences()) sentences.push_back(AnnotationObject(s));
  json items = json::array();
  for (const auto &it : session.items()) {
    json cands = json::array();
    for (const auto &c : it.candidates) {
      cands.push_back({{"status", std::string(StatusName(c.status))}, {"decided_by", c.decided_by}});
    }
    json adds = json::array();
    for (const auto &a : it.additions) {
      adds.push_back({{"start", a.span.start},
                      {"end", a.span.end},
                      {"class", std::string(ClassName(a.cls))},
                      {"annotator", a.annotator},
                      {"retracted", a.retracted}});
    }
    items.push_back({{"version", it.version},
                     {"conflicts", it.conflicts},
                     {"candidates", std::move(cands)},
                     {"additions", std::move(adds)}});
  }
  json decisions = json::array();
  for (const auto &r : session.log()) decisions.push_back(json::parse(DecisionToJsonLine(r)));
  json j = {{"format", "clinex-curation-snapshot"},
            {"version", 1},
            {"session", session.id()},
            {"sentences", std::move(sentences)},
            {"items", std::move(items)},
            {"decisions", std::move(decisions)}};
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

Session Session::FromSnapshot(std::string_view text, const std::string &source) {
  try {
    json j = json::parse(text);
    if (j.at("format") != "clinex-curation-snapshot" || j.at("version") != 1) {
      throw DataError(source + ": unsupported snapshot format");
    }
    Session s = Create(j.at("session").get<std::string>(),
                       SentencesFromArray(j.at("sentences"), source));
    const json &items = j.at("items");
    if (items.size() != s.items_.size()) throw DataError(source + ": item count mismatch");
    for (size_t i = 0; i < items.size(); ++i) {
      CurationItem &it = s.items_[i];
      const json &ji = items[i];
      it.version = ji.at("version").get<uint64_t>();
      it.conflicts = ji.at("conflicts").get<size_t>();
      const json &cands = ji.at("candidates");
      if (cands.size() != it.candidates.size()) {
        throw DataError(source + ": candidate count mismatch in item " + std::to_string(i));
      }
      for (size_t c = 0; c < cands.size(); ++c) {
        auto status = ParseStatus(cands[c].at("status").get<std::string>());
        if (!status) throw DataError(source + ": bad candidate status");
        it.candidates[c].status = *status;
        it.candidates[c].decided_by = cands[c].at("decided_by").get<std::string>();
      }
      for (const auto &a : ji.at("additions")) {
        auto cls = ParseClass(a.at("class").get<std::string>());
        if (!cls) throw DataError(source + ": bad addition class");
        it.additions.push_back({it.additions.size(),
                                Span{a.at("start").get<size_t>(), a.at("end").get<size_t>()},
                                *cls, a.at("annotator").get<std::string>(),
                                a.at("retracted").get<bool>()});
      }
    }
    for (const auto &d : j.at("decisions")) s.log_.push_back(DecisionFromObject(d));
    return s;
  } catch (const json::exception &e) {
    throw DataError(source + ": malformed snapshot: " + e.what());
  }
}

std::map<std::string, std::string> RenderExport(const ExportResult &result) {
  std::map<std::string, std::string> out;
  std::ostringstream agg;
  WriteConll(result.aggregated, agg);
  out["aggregated"] = agg.str();
  for (const auto &[cls, corpus] : result.per_class) {
    std::ostringstream os;
    WriteConll(corpus, os);
    out[std::string(ClassSlug(cls))] = os.str();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Service.

struct CurationService::Entry {
  Session session;
  std::mutex mu;
  std::ofstream log;
  size_t since_snapshot = 0;
};

namespace {

void WriteFileAtomic(const fs::path &path, const std::string &content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw DataError("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string ReadFile(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

CurationService::CurationService(ServiceOptions options) : options_(std::move(options)) {
  if (options_.state_dir) {
    fs::create_directories(*options_.state_dir);
    Restore();
  }
}

CurationService::~CurationService() = default;

int64_t CurationService::Now() const {
  if (options_.clock) return options_.clock();
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

void CurationService::Restore() {
  fs::path dir(*options_.state_dir);
  std::vector<fs::path> logs;
  for (const auto &e : fs::directory_iterator(dir)) {
    std::string name = e.path().filename().string();
    if (name.size() > 10 && name.ends_with(".log.jsonl")) logs.push_back(e.path());
  }
  std::sort(logs.begin(), logs.end());
  for (const auto &path : logs) {
    std::ifstream in(path, std::ios::binary);
    ParsedLog parsed = ParseLog(in, path.string());
    fs::path snap = dir / (parsed.id + ".snapshot.json");
    auto entry = std::make_unique<Entry>();
    size_t applied = 0;
    if (fs::exists(snap)) {
      entry->session = Session::FromSnapshot(ReadFile(snap), snap.string());
      applied = entry->session.log().size();
      if (applied > parsed.decisions.size()) {
        throw DataError(snap.string() + " is ahead of its decision log");
      }
    } else {
      entry->session = Session::Create(parsed.id, parsed.sentences);
    }
    for (size_t i = applied; i < parsed.decisions.size(); ++i) {
      entry->session.Decide(parsed.decisions[i]);
    }
    entry->log.open(path, std::ios::binary | std::ios::app);
    const std::string &id = parsed.id;
    if (id.size() > 1 && id[0] == 's') {
      try {
        next_id_ = std::max(next_id_, static_cast<size_t>(std::stoul(id.substr(1))) + 1);
      } catch (const std::exception &) {
      }
    }
    sessions_[id] = std::move(entry);
  }
}

std::string CurationService::CreateSession(const std::vector<AnnotatedSentence> &sentences) {
  std::lock_guard<std::mutex> lock(mu_);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "s%04zu", next_id_);
  std::string id = buf;
  auto entry = std::make_unique<Entry>();
  entry->session = Session::Create(id, sentences);
  if (options_.state_dir) {
    fs::path path = fs::path(*options_.state_dir) / (id + ".log.jsonl");
    entry->log.open(path, std::ios::binary | std::ios::trunc);
    if (!entry->log) throw DataError("cannot write " + path.string());
    entry->log << CreateRecord(entry->session) << '\n';
    entry->log.flush();
  }
  ++next_id_;
  sessions_[id] = std::move(entry);
  return id;
}

CurationService::Entry &CurationService::Find(const std::string &session) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = sessions_.find(session);
  if (it == sessions_.end()) throw CurationError("not_found", "no session " + session);
  return *it->second;
}

std::vector<std::string> CurationService::SessionIds() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<std::string> out;
  for (const auto &[id, e] : sessions_) out.push_back(id);
  return out;
}

std::vector<CurationItem> CurationService::NextBatch(const std::string &session,
                                                     const std::string &annotator, size_t k) {
  if (annotator.empty()) throw CurationError("invalid_request", "annotator is required");
  Entry &e = Find(session);
  std::lock_guard<std::mutex> lock(e.mu);
  return e.session.NextBatch(annotator, k, Now(), options_.lease_ttl_ms);
}

uint64_t CurationService::Decide(const std::string &session, DecisionRecord record) {
  Entry &e = Find(session);
  std::lock_guard<std::mutex> lock(e.mu);
  record.timestamp_ms = Now();
  uint64_t version = e.session.Decide(record);
  if (e.log.is_open()) {
    e.log << DecisionToJsonLine(record) << '\n';
    e.log.flush();
    if (++e.since_snapshot >= options_.snapshot_every) {
      WriteFileAtomic(fs::path(*options_.state_dir) / (session + ".snapshot.json"),
                      SnapshotJson(e.session));
      e.since_snapshot = 0;
    }
  }
  return version;
}

Progress CurationService::GetProgress(const std::string &session) {
  Entry &e = Find(session);
  std::lock_guard<std::mutex> lock(e.mu);
  return e.session.GetProgress();
}

ExportResult CurationService::Export(const std::string &session) {
  Entry &e = Find(session);
  std::lock_guard<std::mutex> lock(e.mu);
  ExportResult result = e.session.Export();
  if (options_.state_dir) {
    fs::path dir = fs::path(*options_.state_dir) / (session + "-export");
    fs::create_directories(dir);
    for (const auto &[name, text] : RenderExport(result)) {
      WriteFileAtomic(dir / (name + ".conll"), text);
    }
  }
  return result;
}

CurationItem CurationService::Item(const std::string &session, size_t item) {
  Entry &e = Find(session);
  std::lock_guard<std::mutex> lock(e.mu);
  return e.session.item(item);
}

std::string CurationService::ItemJson(const CurationItem &it) const {
  json cands = json::array();
  for (const auto &c : it.candidates) {
    const auto &m = c.match;
    cands.push_back({{"id", c.id},
                     {"start", m.span.start},
                     {"end", m.span.end},
                     {"text", it.text.substr(m.span.start, m.span.length())},
                     {"cui", m.cui},
                     {"tui_set", m.tuis},
                     {"score", m.score},
                     {"class", std::string(ClassName(m.cls))},
                     {"status", std::string(StatusName(c.status))},
                     {"decided_by", c.decided_by}});
  }
  json adds = json::array();
  for (const auto &a : it.additions) {
    if (a.retracted) continue;
    adds.push_back({{"id", a.id},
                    {"start", a.span.start},
                    {"end", a.span.end},
                    {"text", it.text.substr(a.span.start, a.span.length())},
                    {"class", std::string(ClassName(a.cls))},
                    {"annotator", a.annotator}});
  }
  json tokens = json::array();
  json expansions = json::array();
  for (const Token &t : Tokenize(it.text)) {
    tokens.push_back({{"start", t.span.start}, {"end", t.span.end}});
    if (options_.glossary) {
      if (const std::string *exp = options_.glossary->Find(t.text)) {
        expansions.push_back({{"start", t.span.start}, {"end", t.span.end}, {"expansion", *exp}});
      }
    }
  }
  json j = {{"id", it.id},
            {"doc_id", it.doc_id},
            {"sentence_index", it.sentence_index},
            {"text", it.text},
            {"version", it.version},
            {"tokens", std::move(tokens)},
            {"expansions", std::move(expansions)},
            {"candidates", std::move(cands)},
            {"additions", std::move(adds)},
            {"leased_to", it.leased_to}};
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

namespace {

HttpReply Reply(int status, const json &body) {
  return {status, body.dump(-1, ' ', false, json::error_handler_t::replace)};
}

HttpReply ErrorReply(const CurationError &e, std::optional<std::string> item_json) {
  int status = 400;
  if (e.code() == "not_found" || e.code() == "unknown_candidate") status = 404;
  if (e.code() == "stale_version" || e.code() == "overlap") status = 409;
  json body = {{"code", e.code()}, {"message", e.what()}};
  if (e.current_version()) body["current_version"] = *e.current_version();
  if (item_json) body["item"] = json::parse(*item_json);
  return Reply(status, body);
}

std::vector<std::string> PathParts(std::string_view path) {
  std::vector<std::string> parts;
  size_t q = path.find('?');
  if (q != std::string_view::npos) path = path.substr(0, q);
  size_t i = 0;
  while (i < path.size()) {
    size_t j = path.find('/', i);
    if (j == std::string_view::npos) j = path.size();
    if (j > i) parts.emplace_back(path.substr(i, j - i));
    i = j + 1;
  }
  return parts;
}

json ProgressJson(const Progress &p) {
  return {{"items", p.items},
          {"items_pending", p.items_pending},
          {"pending", p.pending},
          {"accepted", p.accepted},
          {"rejected", p.rejected},
          {"additions", p.additions},
          {"decisions", p.decisions},
          {"conflicts", p.conflicts}};
}

}  // namespace

HttpReply CurationService::Handle(std::string_view method, std::string_view path,
                                  const std::map<std::string, std::string> &query,
                                  std::string_view body) {
  std::vector<std::string> parts = PathParts(path);
  std::optional<std::string> stale_item;
  try {
    if (parts.empty() || parts[0] != "sessions") {
      throw CurationError("not_found", "unknown path " + std::string(path));
    }
    if (parts.size() == 1) {
      if (method != "POST") throw CurationError("invalid_request", "use POST /sessions");
      json j;
      try {
        j = json::parse(body);
      } catch (const json::exception &e) {
        throw CurationError("invalid_request", std::string("body is not JSON: ") + e.what());
      }
      std::vector<AnnotatedSentence> sentences;
      if (j.contains("sentences")) {
        sentences = SentencesFromArray(j.at("sentences"), "request");
      } else if (j.contains("path")) {
        sentences = ReadAnnotations(j.at("path").get<std::string>());
      } else {
        throw CurationError("invalid_request", "body needs 'sentences' or 'path'");
      }
      std::string id = CreateSession(sentences);
      return Reply(201, {{"session_id", id}, {"items", GetProgress(id).items}});
    }
    const std::string &id = parts[1];
    std::string op = parts.size() == 3 ? parts[2] : "";
    if (op == "batch" && method == "GET") {
      auto annotator = query.find("annotator");
      if (annotator == query.end()) throw CurationError("invalid_request", "annotator is required");
      size_t k = 10;
      if (auto kit = query.find("k"); kit != query.end()) {
        try {
          k = std::stoul(kit->second);
        } catch (const std::exception &) {
          throw CurationError("invalid_request", "k must be a non-negative integer");
        }
      }
      json items = json::array();
      for (const auto &it : NextBatch(id, annotator->second, k)) {
        items.push_back(json::parse(ItemJson(it)));
      }
      return Reply(200, {{"items", std::move(items)},
                         {"lease_ttl_ms", options_.lease_ttl_ms}});
    }
    if (op == "decisions" && method == "POST") {
      DecisionRecord r;
      try {
        json j = json::parse(body);
        r.item_id = j.at("item_id").get<size_t>();
        auto action = ParseAction(j.at("action").get<std::string>());
        if (!action) throw CurationError("invalid_request", "unknown action");
        r.action = *action;
        r.annotator = j.at("annotator").get<std::string>();
        r.base_version = j.at("base_version").get<uint64_t>();
        if (j.contains("candidate_id") && !j["candidate_id"].is_null()) {
          r.candidate_id = j["candidate_id"].get<size_t>();
        }
        if (j.contains("addition_id") && !j["addition_id"].is_null()) {
          r.addition_id = j["addition_id"].get<size_t>();
        }
        if (j.contains("start") || j.contains("end")) {
          r.span = Span{j.at("start").get<size_t>(), j.at("end").get<size_t>()};
        }
        if (j.contains("class") && !j["class"].is_null()) {
          auto cls = ParseClass(j["class"].get<std::string>());
          if (!cls) throw CurationError("invalid_request", "unknown class");
          r.cls = *cls;
        }
      } catch (const json::exception &e) {
        throw CurationError("invalid_request", std::string("bad decision: ") + e.what());
      }
      try {
        uint64_t version = Decide(id, r);
        return Reply(200, {{"version", version},
                           {"item", json::parse(ItemJson(Item(id, r.item_id)))}});
      } catch (const CurationError &e) {
        if (e.code() == "stale_version") stale_item = ItemJson(Item(id, r.item_id));
        throw;
      }
    }
    if (op == "progress" && method == "GET") return Reply(200, ProgressJson(GetProgress(id)));
    if (op == "export" && method == "POST") {
      ExportResult result = Export(id);
      json classes = json::object();
      auto rendered = RenderExport(result);
      for (const auto &[name, text] : rendered) {
        if (name != "aggregated") classes[name] = text;
      }
      return Reply(200, {{"aggregated", rendered["aggregated"]},
                         {"classes", std::move(classes)},
                         {"sentences", result.aggregated.size()},
                         {"pending_as_rejected", result.pending_as_rejected},
                         {"warnings", result.warnings}});
    }
    throw CurationError("not_found",
                        "unknown endpoint " + std::string(method) + " " + std::string(path));
  } catch (const CurationError &e) {
    return ErrorReply(e, stale_item);
  } catch (const DataError &e) {
    return ErrorReply(CurationError("invalid_request", e.what()), std::nullopt);
  } catch (const std::exception &e) {
    return Reply(500, {{"code", "internal"}, {"message", e.what()}});
  }
}

}  // namespace clinex
