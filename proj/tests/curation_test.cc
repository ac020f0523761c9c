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

#include <filesystem>
#include <sstream>

#include "clinex/curation.h"
#include "clinex/curation_server.h"
#include "gtest/gtest.h"
#include "httplib.h"
#include "json.hpp"

namespace clinex {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

AnnotatedMatch Drug(size_t start, size_t end) {
  return {Span{start, end}, "C0000970", {"T121"}, 1.0, EntityClass::kDrug};
}

std::vector<AnnotatedSentence> Sentences() {
  return {
      {"d", 0, "tomou paracetamol hoje", {Drug(6, 17)}},
      {"d", 1, "sem queixas", {}},
      {"d", 2, "fez ondansetrona e dexametasona", {Drug(4, 16), Drug(19, 31)}},
  };
}

DecisionRecord Decision(const CurationItem &item, Action a, std::optional<size_t> candidate,
                        const std::string &who = "ana") {
  DecisionRecord r;
  r.item_id = item.id;
  r.action = a;
  r.candidate_id = candidate;
  r.annotator = who;
  r.base_version = item.version;
  return r;
}

std::string ExportText(const Session &s) {
  std::string out;
  for (const auto &[name, text] : RenderExport(s.Export())) out += name + "\n" + text;
  return out;
}

TEST(SessionTest, OneItemPerCandidateSentence) {
  EXPECT_EQ(Session::Create("s", Sentences()).items().size(), 2u);
  EXPECT_THROW(Session::Create("s", {}), DataError);
}

TEST(SessionTest, Leases) {
  auto sentences = Sentences();
  sentences.push_back({"d", 3, "iniciou paracetamol", {Drug(8, 19)}});
  Session s = Session::Create("s", sentences);
  EXPECT_EQ(s.NextBatch("ana", 5, 0, 1000).size(), 3u);
  EXPECT_TRUE(s.NextBatch("bruno", 5, 10, 1000).empty());
  // Leases expire.
  EXPECT_EQ(s.NextBatch("bruno", 2, 1000, 1000).size(), 2u);
  auto rest = s.NextBatch("carla", 5, 1001, 1000);
  ASSERT_EQ(rest.size(), 1u);
}

TEST(SessionTest, DisjointBatches) {
  auto sentences = Sentences();
  Session s = Session::Create("s", sentences);
  auto a = s.NextBatch("ana", 1, 0, 1000);
  auto b = s.NextBatch("bruno", 1, 0, 1000);
  ASSERT_EQ(a.size(), 1u);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_NE(a[0].id, b[0].id);
}

TEST(SessionTest, RejectBumpsVersion) {
  Session s = Session::Create("s", Sentences());
  const CurationItem &item = s.items()[0];
  uint64_t v = s.Decide(Decision(item, Action::kReject, 0));
  EXPECT_EQ(v, 1u);
  EXPECT_EQ(s.items()[0].candidates[0].status, CandidateStatus::kRejected);
}

TEST(SessionTest, StaleVersionRejected) {
  Session s = Session::Create("s", Sentences());
  DecisionRecord r = Decision(s.items()[0], Action::kAccept, 0);
  s.Decide(r);
  try {
    s.Decide(r);
    FAIL() << "stale decision accepted";
  } catch (const CurationError &e) {
    EXPECT_EQ(e.code(), "stale_version");
    EXPECT_EQ(e.current_version(), 1u);
  }
}

TEST(SessionTest, AddOverlappingAcceptedFails) {
  Session s = Session::Create("s", Sentences());
  s.Decide(Decision(s.items()[0], Action::kAccept, 0));
  DecisionRecord add = Decision(s.items()[0], Action::kAdd, std::nullopt);
  add.span = Span{10, 22};
  add.cls = EntityClass::kDrug;
  try {
    s.Decide(add);
    FAIL() << "overlap accepted";
  } catch (const CurationError &e) {
    EXPECT_EQ(e.code(), "overlap");
  }
  add.span = Span{18, 22};
  EXPECT_EQ(s.Decide(add), 2u);
  EXPECT_EQ(s.items()[0].Mentions().size(), 2u);
}

TEST(SessionTest, RetractRestoresPending) {
  Session s = Session::Create("s", Sentences());
  s.Decide(Decision(s.items()[0], Action::kAccept, 0));
  s.Decide(Decision(s.items()[0], Action::kRetract, 0));
  EXPECT_EQ(s.items()[0].candidates[0].status, CandidateStatus::kPending);
  EXPECT_EQ(s.log().size(), 2u);
}

TEST(SessionTest, ConflictsCounted) {
  Session s = Session::Create("s", Sentences());
  s.Decide(Decision(s.items()[0], Action::kAccept, 0, "ana"));
  s.Decide(Decision(s.items()[0], Action::kReject, 0, "bruno"));
  EXPECT_EQ(s.items()[0].candidates[0].status, CandidateStatus::kRejected);
  EXPECT_EQ(s.GetProgress().conflicts, 1u);
}

TEST(ExportTest, AllRejectedIsEmpty) {
  Session s = Session::Create("s", Sentences());
  for (size_t i = 0; i < s.items().size(); ++i) {
    for (size_t c = 0; c < s.items()[i].candidates.size(); ++c) {
      s.Decide(Decision(s.items()[i], Action::kReject, c));
    }
  }
  ExportResult r = s.Export();
  EXPECT_TRUE(r.aggregated.empty());
  for (const auto &[cls, corpus] : r.per_class) EXPECT_TRUE(corpus.empty());
}

TEST(ExportTest, AcceptedDrugGoesToDrugAndAggregated) {
  Session s = Session::Create("s", Sentences());
  s.Decide(Decision(s.items()[0], Action::kAccept, 0));
  ExportResult r = s.Export();
  ASSERT_EQ(r.aggregated.size(), 1u);
  EXPECT_EQ(r.per_class.at(EntityClass::kDrug).size(), 1u);
  EXPECT_TRUE(r.per_class.at(EntityClass::kDisease).empty());
  EXPECT_TRUE(r.per_class.at(EntityClass::kProcedure).empty());
  // Pending candidates of the second item count as rejected.
  EXPECT_EQ(r.pending_as_rejected, 2u);
}

TEST(ExportTest, ReplayIsByteIdentical) {
  Session s = Session::Create("s", Sentences());
  s.Decide(Decision(s.items()[0], Action::kAccept, 0));
  s.Decide(Decision(s.items()[1], Action::kReject, 0));
  DecisionRecord add = Decision(s.items()[1], Action::kAdd, std::nullopt);
  add.span = Span{0, 3};
  add.cls = EntityClass::kProcedure;
  s.Decide(add);
  std::stringstream log;
  WriteLog(s, log);
  Session replay = ReplayLog(log, "log");
  EXPECT_EQ(ExportText(replay), ExportText(s));
  Session restored = Session::FromSnapshot(SnapshotJson(s), "snapshot");
  EXPECT_EQ(ExportText(restored), ExportText(s));
  EXPECT_EQ(restored.log(), s.log());
}

TEST(DecisionTest, JsonRoundTrip) {
  DecisionRecord r;
  r.item_id = 4;
  r.action = Action::kAdd;
  r.span = Span{2, 9};
  r.cls = EntityClass::kDisease;
  r.annotator = "ana";
  r.timestamp_ms = 1234;
  r.base_version = 3;
  EXPECT_EQ(DecisionFromJson(DecisionToJsonLine(r), "x", 1), r);
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("clinex-curation-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  ServiceOptions Options() {
    ServiceOptions o;
    o.state_dir = dir_.string();
    o.clock = [this] { return tick_++; };
    return o;
  }
  fs::path dir_;
  int64_t tick_ = 0;
};

TEST_F(ServiceTest, RestoresFromStateDir) {
  std::string before;
  std::string id;
  {
    CurationService service(Options());
    id = service.CreateSession(Sentences());
    auto batch = service.NextBatch(id, "ana", 10);
    service.Decide(id, Decision(batch[0], Action::kAccept, 0));
    for (const auto &[k, v] : RenderExport(service.Export(id))) before += k + v;
  }
  CurationService again(Options());
  ASSERT_EQ(again.SessionIds(), std::vector<std::string>{id});
  std::string after;
  for (const auto &[k, v] : RenderExport(again.Export(id))) after += k + v;
  EXPECT_EQ(after, before);
  EXPECT_EQ(again.GetProgress(id).decisions, 1u);
}

TEST_F(ServiceTest, HttpRoundTrip) {
  CurationService service(Options());
  CurationHttpServer server(service);
  int port = server.Bind("127.0.0.1", 0);
  server.Start();
  httplib::Client client("127.0.0.1", port);

  json sentences = json::array();
  for (const auto &s : Sentences()) sentences.push_back(json::parse(ToJsonLine(s)));
  auto created = client.Post("/sessions", json{{"sentences", sentences}}.dump(),
                             "application/json");
  ASSERT_TRUE(created);
  ASSERT_EQ(created->status, 201);
  json c = json::parse(created->body);
  std::string id = c["session_id"];
  EXPECT_EQ(c["items"], 2);

  auto batch = client.Get("/sessions/" + id + "/batch?annotator=ana&k=5");
  ASSERT_TRUE(batch);
  json items = json::parse(batch->body)["items"];
  ASSERT_EQ(items.size(), 2u);
  json item = items[0];

  json decision = {{"item_id", item["id"]},
                   {"action", "accept"},
                   {"annotator", "ana"},
                   {"base_version", item["version"]},
                   {"candidate_id", 0}};
  auto ok = client.Post("/sessions/" + id + "/decisions", decision.dump(), "application/json");
  ASSERT_TRUE(ok);
  EXPECT_EQ(ok->status, 200);
  EXPECT_EQ(json::parse(ok->body)["version"], 1);

  auto stale = client.Post("/sessions/" + id + "/decisions", decision.dump(),
                           "application/json");
  ASSERT_TRUE(stale);
  EXPECT_EQ(stale->status, 409);
  EXPECT_EQ(json::parse(stale->body)["current_version"], 1);

  json add = {{"item_id", item["id"]}, {"action", "add"},  {"annotator", "ana"},
              {"base_version", 1},     {"start", 8},       {"end", 12},
              {"class", "Drug"}};
  auto overlap = client.Post("/sessions/" + id + "/decisions", add.dump(), "application/json");
  ASSERT_TRUE(overlap);
  EXPECT_EQ(overlap->status, 409);

  auto missing = client.Get("/sessions/nope/progress");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);

  auto progress = client.Get("/sessions/" + id + "/progress");
  ASSERT_TRUE(progress);
  EXPECT_EQ(json::parse(progress->body)["accepted"], 1);

  auto exported = client.Post("/sessions/" + id + "/export", "", "application/json");
  ASSERT_TRUE(exported);
  ASSERT_EQ(exported->status, 200);
  json e = json::parse(exported->body);
  EXPECT_EQ(e["sentences"], 1);
  server.Stop();

  // The log written by the service replays to the same export.
  std::ifstream log(dir_ / (id + ".log.jsonl"));
  Session replay = ReplayLog(log, "log");
  EXPECT_EQ(RenderExport(replay.Export()).at("aggregated"), e["aggregated"].get<std::string>());
}

}  // namespace
}  // namespace clinex
