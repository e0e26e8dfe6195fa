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

#ifndef FACTORSCOPE_SERVICE_H_
#define FACTORSCOPE_SERVICE_H_

#include <cstddef>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "factorscope/factor_metrics.h"
#include "factorscope/market_data.h"

namespace factorscope {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  int workers = 4;
  std::size_t cache_size = 64;
  int training_days = 200;
  int cycle_days = 21;
  int horizon = 63;
  double lambda_ratio = 0.1;
  // Threads per analysis.
  int jobs = 1;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::map<std::string, std::string> headers;
};

// Small thread-safe LRU of response bodies keyed by request hash.
class ResponseCache {
 public:
  explicit ResponseCache(std::size_t capacity) : capacity_(capacity) {}

  std::optional<std::string> Find(const std::string& key);
  void Insert(const std::string& key, std::string body);

 private:
  std::size_t capacity_;
  std::mutex mu_;
  std::list<std::pair<std::string, std::string>> entries_;
  std::unordered_map<std::string,
                     std::list<std::pair<std::string, std::string>>::iterator>
      index_;
};

// Transport-independent request handling for the JSON API. HttpServer
// adapts it to cpp-httplib; tests call Handle() directly.
class Service {
 public:
  explicit Service(ServiceConfig config);

  HttpResponse Handle(std::string_view method, std::string_view path,
                      std::string_view body);

  const ServiceConfig& config() const { return config_; }

 private:
  struct Entry {
    std::string id;
    std::shared_ptr<const MarketDataset> dataset;
  };

  HttpResponse LoadDataset(std::string_view body);
  HttpResponse GetDataset(const std::string& id, bool sectors_only);
  HttpResponse ListFactors();
  HttpResponse Analyze(std::string_view body);
  HttpResponse Backtest(std::string_view body);

  std::shared_ptr<const MarketDataset> FindDataset(const std::string& id) const;

  ServiceConfig config_;
  mutable std::shared_mutex registry_mu_;
  std::map<std::string, std::shared_ptr<const MarketDataset>> datasets_;
  ResponseCache cache_;
  SensitivityCache sensitivity_cache_;
};

// Binds a Service to HTTP. Listen() blocks until Stop().
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Returns the bound port, or -1. Port 0 picks a free port.
  int Bind(const std::string& host, int port);
  bool ListenAfterBind();
  void Stop();
  bool is_running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace factorscope

#endif  // FACTORSCOPE_SERVICE_H_
