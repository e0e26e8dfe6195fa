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

#include <cmath>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "factorscope/artifacts.h"
#include "factorscope/synthetic.h"
#include "fixtures.h"
#include "test_util.h"

namespace factorscope {
namespace {

using testing::kSmallD;
using testing::kSmallT;
using testing::SmallConfig;

ServiceConfig SmallServiceConfig() {
  ServiceConfig config;
  config.training_days = kSmallT;
  config.cycle_days = kSmallD;
  config.horizon = 5;
  config.workers = 2;
  return config;
}

class ServiceTest : public ::testing::Test {
 protected:
  ServiceTest() : data_(GenerateSynthetic(SmallConfig())), service_(SmallServiceConfig()) {}

  Json Upload() {
    const Json request{{"prices_csv", FormatPricesCsv(data_.dataset)},
                       {"factors_csv", FormatFactorsCsv(data_.dataset)},
                       {"sectors_csv", FormatSectorsCsv(data_.dataset)}};
    const HttpResponse r = service_.Handle("POST", "/api/datasets", request.dump());
    EXPECT_TRUE(r.status == 201 || r.status == 200) << r.body;
    return Json::parse(r.body);
  }

  HttpResponse Post(const std::string& path, const Json& body) {
    return service_.Handle("POST", path, body.dump());
  }

  std::string Date(int day) const {
    return FormatIsoDate(data_.dataset.calendar().date(day));
  }

  SyntheticData data_;
  Service service_;
};

TEST_F(ServiceTest, HealthAndFactorCatalog) {
  const HttpResponse health = service_.Handle("GET", "/healthz", "");
  EXPECT_EQ(health.status, 200);
  EXPECT_EQ(Json::parse(health.body)["status"], "ok");

  const Json factors = Json::parse(service_.Handle("GET", "/api/factors", "").body);
  EXPECT_EQ(factors["factors"].size(), 56u);
  int total = 0;
  for (const auto& [type, count] : factors["type_counts"].items()) total += count.get<int>();
  EXPECT_EQ(total, 56);

  EXPECT_EQ(service_.Handle("GET", "/api/nothing", "").status, 404);
  EXPECT_EQ(service_.Handle("DELETE", "/healthz", "").status, 404);
}

TEST_F(ServiceTest, DatasetLoadIsIdempotent) {
  const Json request{{"prices_csv", FormatPricesCsv(data_.dataset)},
                     {"factors_csv", FormatFactorsCsv(data_.dataset)},
                     {"sectors_csv", FormatSectorsCsv(data_.dataset)}};
  const HttpResponse first = Post("/api/datasets", request);
  const HttpResponse second = Post("/api/datasets", request);
  EXPECT_EQ(first.status, 201);
  EXPECT_EQ(second.status, 200);
  const Json a = Json::parse(first.body);
  const Json b = Json::parse(second.body);
  EXPECT_EQ(a["dataset_id"], b["dataset_id"]);
  EXPECT_EQ(a["stocks"].size(), 4u);
  EXPECT_EQ(a["calendar"]["days"], 90);

  const std::string id = a["dataset_id"];
  const HttpResponse sectors = service_.Handle("GET", "/api/datasets/" + id + "/sectors", "");
  EXPECT_EQ(sectors.status, 200);
  EXPECT_EQ(Json::parse(sectors.body)["sectors"].size(), 2u);
  EXPECT_EQ(service_.Handle("GET", "/api/datasets/" + id, "").status, 200);
  EXPECT_EQ(service_.Handle("GET", "/api/datasets/ffff", "").status, 404);
}

TEST_F(ServiceTest, DatasetLoadErrors) {
  const HttpResponse missing = Post(
      "/api/datasets", Json{{"prices_csv", FormatPricesCsv(data_.dataset)},
                            {"factors_csv", FormatFactorsCsv(data_.dataset)}});
  EXPECT_EQ(missing.status, 400);
  EXPECT_EQ(Json::parse(missing.body)["error"], "MissingFile");

  const HttpResponse malformed = Post(
      "/api/datasets", Json{{"prices_csv", "date,stock_id,close\n2020-01-02,A,abc\n"},
                            {"factors_csv", testing::kTinyFactors},
                            {"sectors_csv", testing::kTinySectors}});
  EXPECT_EQ(malformed.status, 400);

  EXPECT_EQ(service_.Handle("POST", "/api/datasets", "not json").status, 400);
  EXPECT_EQ(Post("/api/datasets", Json{{"dir", 5}}).status, 400);
}

TEST_F(ServiceTest, AnalysisRespectsFactorSubsetAndPayloadIdentity) {
  const std::string id = Upload()["dataset_id"];
  const auto& names = data_.dataset.factors().names;
  const HttpResponse r = Post("/api/analysis", Json{{"dataset_id", id},
                                                    {"factors", {names[0], names[1]}},
                                                    {"lambda_ratio", 0.0}});
  ASSERT_EQ(r.status, 200) << r.body;
  const Json body = Json::parse(r.body);
  EXPECT_EQ(body["period"]["start_date"], Date(kSmallT + 1));
  for (const Json& stock : body["models"]["stocks"]) {
    for (const Json& cycle : stock["cycles"]) {
      for (const Json& w : cycle["weights"]) {
        EXPECT_TRUE(w["factor"] == names[0] || w["factor"] == names[1]);
      }
    }
  }
  const Json& importance = body["metrics"]["importance"];
  ASSERT_FALSE(importance.empty());
  for (const Json& imp : importance) {
    const double w = imp["weight"];
    const double mean = imp["mean_value"];
    const double contribution = imp["contribution"];
    EXPECT_NEAR(contribution, w * mean * kSmallD, 1e-9 * (1.0 + std::abs(contribution)));
  }
  EXPECT_FALSE(body["metrics"].contains("sensitivity"));
}

TEST_F(ServiceTest, RepeatedAnalysisIsServedFromCache) {
  const std::string id = Upload()["dataset_id"];
  const Json request{{"dataset_id", id}, {"with_sensitivity", true}};
  const HttpResponse fresh = Post("/api/analysis", request);
  const HttpResponse cached = Post("/api/analysis", request);
  ASSERT_EQ(fresh.status, 200) << fresh.body;
  EXPECT_EQ(fresh.headers.at("X-Cached"), "false");
  EXPECT_EQ(cached.headers.at("X-Cached"), "true");
  EXPECT_EQ(fresh.body, cached.body);
  EXPECT_TRUE(Json::parse(fresh.body)["metrics"].contains("sensitivity"));
}

TEST_F(ServiceTest, AnalysisErrors) {
  const std::string id = Upload()["dataset_id"];
  EXPECT_EQ(Post("/api/analysis", Json{{"dataset_id", "nope"}}).status, 404);
  const HttpResponse early =
      Post("/api/analysis", Json{{"dataset_id", id}, {"period", {{"start_date", Date(5)}}}});
  EXPECT_EQ(early.status, 422);
  EXPECT_EQ(Json::parse(early.body)["error"], "InsufficientHistory");
  EXPECT_EQ(Post("/api/analysis", Json{{"dataset_id", id}, {"model", "ridge"}}).status, 422);
  EXPECT_EQ(Post("/api/analysis", Json{{"dataset_id", id}, {"metric_kind", "x"}}).status, 422);
  EXPECT_EQ(Post("/api/analysis", Json{{"dataset_id", id}, {"stock_ids", {"X"}}}).status,
            422);
  EXPECT_EQ(Post("/api/analysis", Json{{"dataset_id", id}, {"stock_ids", 3}}).status, 400);

  const HttpResponse adjusted = Post(
      "/api/analysis",
      Json{{"dataset_id", id},
           {"period", {{"start_date", Date(kSmallT + 1)}, {"end_date", Date(kSmallT + 25)}}}});
  ASSERT_EQ(adjusted.status, 200);
  const Json period = Json::parse(adjusted.body)["period"];
  EXPECT_TRUE(period["adjusted"].get<bool>());
  EXPECT_EQ(period["end_date"], Date(kSmallT + 20));
  EXPECT_EQ(period["requested_end_date"], Date(kSmallT + 25));
}

TEST_F(ServiceTest, BacktestKeepsPortfolioOrder) {
  const std::string id = Upload()["dataset_id"];
  const auto& stocks = data_.dataset.stocks();
  const Json request{
      {"dataset_id", id},
      {"portfolios",
       {{{"name", "first"}, {"stocks", {stocks[0].id, stocks[1].id}}},
        {{"name", "second"},
         {"stocks", {stocks[2].id}},
         {"strategy", "always_hold"},
         {"benchmark", stocks[2].sector}}}}};
  const HttpResponse r = Post("/api/backtest", request);
  ASSERT_EQ(r.status, 200) << r.body;
  const Json body = Json::parse(r.body);
  ASSERT_EQ(body["results"].size(), 2u);
  EXPECT_EQ(body["results"][0]["spec"]["name"], "first");
  EXPECT_EQ(body["results"][1]["spec"]["name"], "second");
  EXPECT_EQ(body["results"][1]["spec"]["benchmark_scope"], stocks[2].sector);
  EXPECT_EQ(body["results"][0]["outlook"]["dates"].size(), 5u);
  // The default period leaves room for the outlook horizon.
  EXPECT_EQ(body["period"]["end_date"], Date(kSmallT + 4 * kSmallD));
}

TEST_F(ServiceTest, BacktestErrors) {
  const std::string id = Upload()["dataset_id"];
  const HttpResponse empty =
      Post("/api/backtest", Json{{"dataset_id", id}, {"portfolios", Json::array()}});
  EXPECT_EQ(empty.status, 422);
  EXPECT_EQ(Json::parse(empty.body)["error"], "InvalidSpec");

  const Json bad{{"dataset_id", id},
                 {"portfolios",
                  {{{"stocks", {data_.dataset.stock(0).id}}},
                   {{"stocks", {"NOPE.SH"}}}}}};
  const HttpResponse r = Post("/api/backtest", bad);
  EXPECT_EQ(r.status, 422);
  const Json body = Json::parse(r.body);
  EXPECT_EQ(body["index"], 1);
  EXPECT_NE(body["message"].get<std::string>().find("NOPE.SH"), std::string::npos);

  const Json strategy{{"dataset_id", id},
                      {"portfolios",
                       {{{"stocks", {data_.dataset.stock(0).id}}, {"strategy", "short"}}}}};
  EXPECT_EQ(Post("/api/backtest", strategy).status, 422);
}

TEST(ResponseCacheTest, EvictsLeastRecentlyUsed) {
  ResponseCache cache(2);
  cache.Insert("a", "1");
  cache.Insert("b", "2");
  EXPECT_EQ(cache.Find("a"), "1");
  cache.Insert("c", "3");
  EXPECT_FALSE(cache.Find("b"));
  EXPECT_EQ(cache.Find("a"), "1");
  EXPECT_EQ(cache.Find("c"), "3");
}

TEST(HttpServerTest, ServesOverLoopback) {
  Service service(SmallServiceConfig());
  HttpServer server(service);
  const int port = server.Bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread loop([&] { server.ListenAfterBind(); });

  httplib::Client client("127.0.0.1", port);
  auto health = client.Get("/healthz");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(health->get_header_value("Content-Type"), "application/json");

  const SyntheticData data = GenerateSynthetic(SmallConfig());
  const Json upload{{"prices_csv", FormatPricesCsv(data.dataset)},
                    {"factors_csv", FormatFactorsCsv(data.dataset)},
                    {"sectors_csv", FormatSectorsCsv(data.dataset)}};
  auto loaded = client.Post("/api/datasets", upload.dump(), "application/json");
  ASSERT_TRUE(loaded);
  EXPECT_EQ(loaded->status, 201);
  const std::string id = Json::parse(loaded->body)["dataset_id"];

  const std::string request = Json{{"dataset_id", id}}.dump();
  auto first = client.Post("/api/analysis", request, "application/json");
  auto second = client.Post("/api/analysis", request, "application/json");
  ASSERT_TRUE(first && second);
  EXPECT_EQ(first->status, 200);
  EXPECT_EQ(first->get_header_value("X-Cached"), "false");
  EXPECT_EQ(second->get_header_value("X-Cached"), "true");
  EXPECT_EQ(first->body, second->body);

  auto missing = client.Get("/api/datasets/0000");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);

  server.Stop();
  loop.join();
}

}  // namespace
}  // namespace factorscope
