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

#include "clinex/curation_server.h"

#include <stdexcept>
#include <thread>

#include "httplib.h"

namespace clinex {

struct CurationHttpServer::Impl {
  CurationService &service;
  httplib::Server server;
  std::thread thread;
  bool bound = false;

  explicit Impl(CurationService &s) : service(s) {}
};

CurationHttpServer::CurationHttpServer(CurationService &service,
                                       std::optional<std::string> static_dir)
    : impl_(std::make_unique<Impl>(service)) {
  auto handler = [this](const httplib::Request &req, httplib::Response &res) {
    std::map<std::string, std::string> query;
    for (const auto &[k, v] : req.params) query.emplace(k, v);
    HttpReply reply = impl_->service.Handle(req.method, req.path, query, req.body);
    res.status = reply.status;
    res.set_content(reply.body, "application/json; charset=utf-8");
  };
  impl_->server.Post(R"(/sessions(/.*)?)", handler);
  impl_->server.Get(R"(/sessions/.*)", handler);
  impl_->server.Options(R"(/.*)", [](const httplib::Request &, httplib::Response &res) {
    res.status = 204;
  });
  impl_->server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                     {"Access-Control-Allow-Headers", "Content-Type"},
                                     {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  if (static_dir && !impl_->server.set_mount_point("/", *static_dir)) {
    throw std::runtime_error("cannot serve " + *static_dir);
  }
}

CurationHttpServer::~CurationHttpServer() { Stop(); }

int CurationHttpServer::Bind(const std::string &host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host)
                        : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  impl_->bound = true;
  return bound;
}

void CurationHttpServer::Listen() {
  if (!impl_->bound) throw std::logic_error("Bind() first");
  impl_->server.listen_after_bind();
}

void CurationHttpServer::Start() {
  if (!impl_->bound) throw std::logic_error("Bind() first");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void CurationHttpServer::Stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace clinex
