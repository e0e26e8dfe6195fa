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
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "factorscope/analysis.h"
#include "factorscope/artifacts.h"
#include "factorscope/backtest.h"
#include "factorscope/error.h"
#include "factorscope/factor_registry.h"
#include "factorscope/parallel.h"

namespace factorscope {
namespace {

// Raised by request parsing so that the HTTP status can be attached at the
// point of failure.
struct RequestError {
  int status;
  std::string code;
  std::string message;
  std::optional<int> index;
};

HttpResponse JsonResponse(int status, const Json& body) {
  HttpResponse out;
  out.status = status;
  out.body = DumpJson(body);
  out.headers["Content-Type"] = "application/json";
  return out;
}

HttpResponse ErrorResponse(const RequestError& error) {
  Json body{{"error", error.code}, {"message", error.message}};
  if (error.index) body["index"] = *error.index;
  return JsonResponse(error.status, body);
}

RequestError FromError(int status, const Error& e,
                       std::optional<int> index = std::nullopt) {
  return {status, std::string(ErrorCodeName(e.code())), e.what(), index};
}

Json ParseBody(std::string_view body) {
  Json parsed = Json::parse(body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) {
    throw RequestError{400, "InvalidArgument", "request body must be a JSON object",
                       std::nullopt};
  }
  return parsed;
}

template <typename T>
T Field(const Json& object, const char* key, T fallback) {
  const auto it = object.find(key);
  if (it == object.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    throw RequestError{400, "InvalidArgument",
                       std::string("field '") + key + "' has the wrong type",
                       std::nullopt};
  }
}

std::vector<std::string> StringList(const Json& object, const char* key) {
  return Field<std::vector<std::string>>(object, key, {});
}

std::string HexId(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

ModelSpec ParseModel(const Json& object, double default_ratio) {
  ModelSpec model;
  const std::string name = Field<std::string>(object, "model", "lasso");
  const auto variant = ParseModelVariant(name);
  if (!variant) {
    throw RequestError{422, "InvalidConfig", "unknown model " + name, std::nullopt};
  }
  model.variant = *variant;
  model.lambda_ratio = Field<double>(object, "lambda_ratio", default_ratio);
  model.cv_folds = Field<int>(object, "cv_folds", model.cv_folds);
  if (!(model.lambda_ratio >= 0.0) || model.cv_folds < 2) {
    throw RequestError{422, "InvalidConfig", "invalid model parameters",
                       std::nullopt};
  }
  return model;
}

std::optional<Date> ParseDateField(const Json& period, const char* key) {
  const std::string text = Field<std::string>(period, key, "");
  if (text.empty()) return std::nullopt;
  const auto date = ParseIsoDate(text);
  if (!date) {
    throw RequestError{422, "InvalidArgument",
                       std::string("period.") + key + " is not an ISO date",
                       std::nullopt};
  }
  return date;
}

struct PeriodRequest {
  int training_days;
  int cycle_days;
  ResolvedPeriod resolved;
};

PeriodRequest ParsePeriod(const Json& request, const MarketDataset& dataset,
                          const ServiceConfig& config, int reserve_days = 0) {
  PeriodRequest out;
  out.training_days = Field<int>(request, "training_days", config.training_days);
  out.cycle_days = Field<int>(request, "cycle_days", config.cycle_days);
  if (out.training_days < 2 || out.cycle_days < 1) {
    throw RequestError{422, "InvalidConfig", "invalid training or cycle length",
                       std::nullopt};
  }
  const Json period = Field<Json>(request, "period", Json::object());
  try {
    out.resolved = ResolvePeriod(dataset.calendar(), ParseDateField(period, "start_date"),
                                 ParseDateField(period, "end_date"),
                                 out.training_days, out.cycle_days, reserve_days);
  } catch (const Error& e) {
    throw FromError(422, e);
  }
  return out;
}

Json PeriodJson(const PeriodRequest& period, const MarketDataset& dataset) {
  const auto& cal = dataset.calendar();
  return Json{
      {"start_date", FormatIsoDate(cal.date(period.resolved.first_day))},
      {"end_date", FormatIsoDate(cal.date(period.resolved.last_day))},
      {"requested_end_date",
       FormatIsoDate(cal.date(period.resolved.requested_last_day))},
      {"adjusted", period.resolved.adjusted},
      {"training_days", period.training_days},
      {"cycle_days", period.cycle_days},
  };
}

std::vector<std::string> SplitPath(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos < path.size()) {
    const std::size_t next = path.find('/', pos);
    const std::size_t end = next == std::string_view::npos ? path.size() : next;
    if (end > pos) parts.emplace_back(path.substr(pos, end - pos));
    pos = end + 1;
  }
  return parts;
}

}  // namespace

std::optional<std::string> ResponseCache::Find(const std::string& key) {
  std::lock_guard lock(mu_);
  const auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  entries_.splice(entries_.begin(), entries_, it->second);
  return it->second->second;
}

void ResponseCache::Insert(const std::string& key, std::string body) {
  if (capacity_ == 0) return;
  std::lock_guard lock(mu_);
  const auto it = index_.find(key);
  if (it != index_.end()) {
    entries_.splice(entries_.begin(), entries_, it->second);
    return;
  }
  entries_.emplace_front(key, std::move(body));
  index_[key] = entries_.begin();
  while (entries_.size() > capacity_) {
    index_.erase(entries_.back().first);
    entries_.pop_back();
  }
}

Service::Service(ServiceConfig config)
    : config_(std::move(config)), cache_(config_.cache_size) {}

HttpResponse Service::Handle(std::string_view method, std::string_view path,
                             std::string_view body) {
  const auto query = path.find('?');
  if (query != std::string_view::npos) path = path.substr(0, query);
  const std::vector<std::string> parts = SplitPath(path);
  try {
    if (method == "GET" && parts.size() == 1 && parts[0] == "healthz") {
      return JsonResponse(200, Json{{"status", "ok"}});
    }
    if (parts.size() >= 2 && parts[0] == "api") {
      const std::string& resource = parts[1];
      if (resource == "datasets") {
        if (method == "POST" && parts.size() == 2) return LoadDataset(body);
        if (method == "GET" && parts.size() == 3) return GetDataset(parts[2], false);
        if (method == "GET" && parts.size() == 4 && parts[3] == "sectors") {
          return GetDataset(parts[2], true);
        }
      } else if (resource == "factors" && parts.size() == 2 && method == "GET") {
        return ListFactors();
      } else if (resource == "analysis" && parts.size() == 2 && method == "POST") {
        return Analyze(body);
      } else if (resource == "backtest" && parts.size() == 2 && method == "POST") {
        return Backtest(body);
      }
    }
    return ErrorResponse({404, "NotFound",
                          std::string(method) + " " + std::string(path) +
                              " is not a known endpoint",
                          std::nullopt});
  } catch (const RequestError& e) {
    return ErrorResponse(e);
  } catch (const Error& e) {
    return ErrorResponse(FromError(422, e));
  } catch (const std::exception& e) {
    return ErrorResponse({500, "Internal", e.what(), std::nullopt});
  }
}

std::shared_ptr<const MarketDataset> Service::FindDataset(
    const std::string& id) const {
  std::shared_lock lock(registry_mu_);
  const auto it = datasets_.find(id);
  if (it == datasets_.end()) {
    throw RequestError{404, "NotFound", "unknown dataset " + id, std::nullopt};
  }
  return it->second;
}

HttpResponse Service::LoadDataset(std::string_view body) {
  const Json request = ParseBody(body);
  LoadOptions options;
  options.strict_factors = Field<bool>(request, "strict_factors", true);
  std::optional<MarketDataset> dataset;
  try {
    if (request.contains("dir")) {
      dataset.emplace(LoadDatasetDir(Field<std::string>(request, "dir", ""), options));
    } else if (request.contains("prices_csv") || request.contains("factors_csv") ||
               request.contains("sectors_csv")) {
      for (const char* key : {"prices_csv", "factors_csv", "sectors_csv"}) {
        if (!request.contains(key)) {
          throw Error(ErrorCode::kMissingFile, std::string("missing ") + key);
        }
      }
      dataset.emplace(ParseDataset(Field<std::string>(request, "prices_csv", ""),
                                   Field<std::string>(request, "factors_csv", ""),
                                   Field<std::string>(request, "sectors_csv", ""),
                                   options));
    } else {
      for (const char* key : {"prices_path", "factors_path", "sectors_path"}) {
        if (!request.contains(key)) {
          throw Error(ErrorCode::kMissingFile, std::string("missing ") + key);
        }
      }
      dataset.emplace(factorscope::LoadDataset(Field<std::string>(request, "prices_path", ""),
                                  Field<std::string>(request, "factors_path", ""),
                                  Field<std::string>(request, "sectors_path", ""),
                                  options));
    }
  } catch (const Error& e) {
    throw FromError(400, e);
  }

  std::uint64_t hash = Fnv1a64(FormatPricesCsv(*dataset));
  hash = Fnv1a64(FormatFactorsCsv(*dataset), hash);
  hash = Fnv1a64(FormatSectorsCsv(*dataset), hash);
  for (FactorType type : dataset->factors().types) {
    hash = Fnv1a64(FactorTypeName(type), hash);
  }
  const std::string id = HexId(hash);

  bool inserted = false;
  std::shared_ptr<const MarketDataset> stored;
  {
    std::unique_lock lock(registry_mu_);
    auto [it, fresh] = datasets_.try_emplace(id, nullptr);
    if (fresh) it->second = std::make_shared<const MarketDataset>(std::move(*dataset));
    inserted = fresh;
    stored = it->second;
  }
  Json out = DatasetSummaryJson(*stored);
  out["dataset_id"] = id;
  return JsonResponse(inserted ? 201 : 200, out);
}

HttpResponse Service::GetDataset(const std::string& id, bool sectors_only) {
  const auto dataset = FindDataset(id);
  if (sectors_only) {
    return JsonResponse(200, Json{{"dataset_id", id}, {"sectors", dataset->sectors()}});
  }
  Json out = DatasetSummaryJson(*dataset);
  out["dataset_id"] = id;
  return JsonResponse(200, out);
}

HttpResponse Service::ListFactors() {
  const FactorRegistry& registry = FactorRegistry::Default();
  Json factors = Json::array();
  for (const FactorInfo& info : registry.factors()) {
    factors.push_back({{"name", info.name}, {"type", FactorTypeName(info.type)}});
  }
  Json counts = Json::object();
  const auto type_counts = registry.TypeCounts();
  for (std::size_t t = 0; t < kFactorTypeCount; ++t) {
    counts[std::string(FactorTypeName(static_cast<FactorType>(t)))] = type_counts[t];
  }
  return JsonResponse(200, Json{{"factors", factors}, {"type_counts", counts}});
}

HttpResponse Service::Analyze(std::string_view body) {
  const Json request = ParseBody(body);
  const std::string dataset_id = Field<std::string>(request, "dataset_id", "");
  const auto dataset = FindDataset(dataset_id);

  const std::string cache_key =
      "analysis\n" + request.dump() + "\n" + std::to_string(config_.training_days) +
      "," + std::to_string(config_.cycle_days) + "," +
      FormatDouble(config_.lambda_ratio);
  if (auto hit = cache_.Find(cache_key)) {
    HttpResponse out;
    out.body = std::move(*hit);
    out.headers["Content-Type"] = "application/json";
    out.headers["X-Cached"] = "true";
    return out;
  }

  const PeriodRequest period = ParsePeriod(request, *dataset, config_);
  const std::string metric_name =
      Field<std::string>(request, "metric_kind", "contribution");
  if (!ParseMetricKind(metric_name)) {
    throw RequestError{422, "InvalidArgument", "unknown metric kind " + metric_name,
                       std::nullopt};
  }

  AnalysisSpec spec;
  spec.period_first = period.resolved.first_day;
  spec.period_last = period.resolved.last_day;
  spec.training_days = period.training_days;
  spec.cycle_days = period.cycle_days;
  spec.model = ParseModel(request, config_.lambda_ratio);
  spec.factors = StringList(request, "factors");
  spec.with_sensitivity = Field<bool>(request, "with_sensitivity", false);
  spec.jobs = config_.jobs;
  try {
    spec.stock_ids = ResolveStocks(*dataset, StringList(request, "stock_ids"),
                                   StringList(request, "sectors"));
  } catch (const Error& e) {
    throw FromError(422, e);
  }

  const AnalysisResult result =
      RunAnalysis(*dataset, spec, &sensitivity_cache_, Fnv1a64(dataset_id));
  Json out{{"dataset_id", dataset_id},
           {"period", PeriodJson(period, *dataset)},
           {"metric_kind", metric_name},
           {"models", ModelsJson(result, *dataset)},
           {"metrics", MetricsJson(result, *dataset)}};
  HttpResponse response = JsonResponse(200, out);
  cache_.Insert(cache_key, response.body);
  response.headers["X-Cached"] = "false";
  return response;
}

HttpResponse Service::Backtest(std::string_view body) {
  const Json request = ParseBody(body);
  const std::string dataset_id = Field<std::string>(request, "dataset_id", "");
  const auto dataset = FindDataset(dataset_id);
  const Json portfolios = Field<Json>(request, "portfolios", Json::array());
  if (!portfolios.is_array() || portfolios.empty()) {
    throw RequestError{422, "InvalidSpec", "portfolio list is empty", std::nullopt};
  }
  const int horizon = Field<int>(request, "horizon", config_.horizon);
  if (horizon < 0) {
    throw RequestError{422, "InvalidConfig", "horizon must be >= 0", std::nullopt};
  }
  // Without an explicit end date, leave room for the outlook.
  const PeriodRequest period = ParsePeriod(request, *dataset, config_, horizon);

  std::vector<std::string> all_factors = dataset->factors().names;
  std::vector<PortfolioSpec> specs;
  for (std::size_t i = 0; i < portfolios.size(); ++i) {
    const int index = static_cast<int>(i);
    const Json& item = portfolios[i];
    try {
      if (!item.is_object()) {
        throw Error(ErrorCode::kInvalidSpec, "portfolio must be an object");
      }
      PortfolioSpec spec;
      spec.name = Field<std::string>(item, "name", "portfolio " + std::to_string(i + 1));
      spec.stock_ids = StringList(item, "stocks");
      spec.factor_ids = StringList(item, "factors");
      if (spec.factor_ids.empty()) spec.factor_ids = all_factors;
      spec.model = ParseModel(item, config_.lambda_ratio);
      const std::string strategy = Field<std::string>(item, "strategy", "long_or_cash");
      const auto kind = ParseStrategy(strategy);
      if (!kind) throw Error(ErrorCode::kInvalidSpec, "unknown strategy " + strategy);
      spec.strategy.kind = *kind;
      spec.strategy.threshold = Field<double>(item, "threshold", 0.0);
      const std::string benchmark = Field<std::string>(item, "benchmark", "market");
      spec.benchmark.sector = benchmark == "market" ? std::string() : benchmark;
      ValidatePortfolioSpec(spec, *dataset);
      specs.push_back(std::move(spec));
    } catch (const Error& e) {
      throw FromError(422, e, index);
    } catch (RequestError& e) {
      e.index = index;
      throw;
    }
  }

  const CyclePartition partition =
      PartitionCycles(period.training_days, period.cycle_days,
                      period.resolved.first_day, period.resolved.last_day);
  BacktestOptions options;
  options.horizon = horizon;
  options.jobs = config_.jobs;
  // Specs run concurrently; results and failures land in per-index slots.
  std::vector<Json> slots(specs.size());
  std::vector<std::optional<Error>> failures(specs.size());
  ParallelFor(specs.size(), std::max(1, config_.workers), [&](std::size_t i) {
    try {
      slots[i] = BacktestJson(RunBacktest(specs[i], *dataset, partition, options),
                              *dataset);
    } catch (const Error& e) {
      failures[i] = e;
    }
  });
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (failures[i]) throw FromError(422, *failures[i], static_cast<int>(i));
  }
  Json results = Json::array();
  for (Json& slot : slots) results.push_back(std::move(slot));
  return JsonResponse(200, Json{{"dataset_id", dataset_id},
                                {"period", PeriodJson(period, *dataset)},
                                {"horizon", horizon},
                                {"results", std::move(results)}});
}

}  // namespace factorscope
