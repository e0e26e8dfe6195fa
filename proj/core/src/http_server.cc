// Copyright 2026 The FactorScope Authors
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

#include "factorscope/service.h"

#include <algorithm>

// After Eigen: <resolv.h> defines a `_res` macro that clashes with it.
#include <httplib.h>

namespace factorscope {

struct HttpServer::Impl {
  explicit Impl(Service& s) : service(s) {}

  void Route(const httplib::Request& req, httplib::Response& res) {
    HttpResponse out = service.Handle(req.method, req.path, req.body);
    res.status = out.status;
    std::string content_type = "application/json";
    for (const auto& [name, value] : out.headers) {
      if (name == "Content-Type") {
        content_type = value;
      } else {
        res.set_header(name, value);
      }
    }
    res.set_content(std::move(out.body), content_type);
  }

  Service& service;
  httplib::Server server;
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {
  const int workers = std::max(1, service.config().workers);
  impl_->server.new_task_queue = [workers] {
    return new httplib::ThreadPool(static_cast<std::size_t>(workers));
  };
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    impl_->Route(req, res);
  };
  const char* pattern = R"(/.*)";
  impl_->server.Get(pattern, handler);
  impl_->server.Post(pattern, handler);
}

HttpServer::~HttpServer() { Stop(); }

int HttpServer::Bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::ListenAfterBind() {
  return impl_->server.listen_after_bind();
}

void HttpServer::Stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

bool HttpServer::is_running() const { return impl_->server.is_running(); }

}  // namespace factorscope
