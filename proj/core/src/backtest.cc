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

#include "factorscope/backtest.h"

#include <algorithm>
#include <string>

#include "factorscope/error.h"

namespace factorscope {

bool StrategyRule::Holds(double predicted_return) const {
  switch (kind) {
    case Kind::kLongOrCash:
      return predicted_return > 0.0;
    case Kind::kAlwaysHold:
      return true;
    case Kind::kThreshold:
      return predicted_return > threshold;
  }
  return false;
}

std::string_view StrategyName(StrategyRule::Kind kind) {
  switch (kind) {
    case StrategyRule::Kind::kLongOrCash:
      return "long_or_cash";
    case StrategyRule::Kind::kAlwaysHold:
      return "always_hold";
    case StrategyRule::Kind::kThreshold:
      return "threshold";
  }
  return "long_or_cash";
}

std::optional<StrategyRule::Kind> ParseStrategy(std::string_view name) {
  if (name == "long_or_cash") return StrategyRule::Kind::kLongOrCash;
  if (name == "always_hold") return StrategyRule::Kind::kAlwaysHold;
  if (name == "threshold") return StrategyRule::Kind::kThreshold;
  return std::nullopt;
}

std::vector<double> StrategyReturns(const StockModelSeries& series,
                                    const StrategyRule& rule) {
  std::vector<double> out;
  for (const CycleModel& cm : series.cycles) {
    for (std::size_t k = 0; k < cm.predicted.size(); ++k) {
      out.push_back(rule.Holds(cm.predicted[k]) ? cm.actual[k] : 0.0);
    }
  }
  return out;
}

std::vector<double> MarketBenchmark(const MarketDataset& dataset,
                                    const BenchmarkScope& scope,
                                    const CyclePartition& partition) {
  std::vector<std::size_t> members;
  if (scope.sector.empty()) {
    for (std::size_t i = 0; i < dataset.stocks().size(); ++i) members.push_back(i);
  } else {
    const auto it = dataset.sectors().find(scope.sector);
    if (it != dataset.sectors().end()) {
      for (const auto& id : it->second) members.push_back(*dataset.FindStock(id));
    }
  }
  if (members.empty()) {
    throw Error(ErrorCode::kEmptyScope,
                "benchmark scope '" + scope.sector + "' has no stocks");
  }
  if (partition.period_last() + 1 > dataset.day_count()) {
    throw Error(ErrorCode::kInsufficientHistory,
                "benchmark period runs past the calendar");
  }
  std::vector<double> out;
  out.reserve(partition.analysis_days());
  for (int day = partition.period_first(); day <= partition.period_last(); ++day) {
    double sum = 0.0;
    for (std::size_t s : members) sum += dataset.stock(s).ReturnOn(day + 1);
    out.push_back(sum / static_cast<double>(members.size()));
  }
  return out;
}

std::vector<double> CumulativeReturns(std::span<const double> daily) {
  std::vector<double> out(daily.size());
  double wealth = 1.0;
  for (std::size_t t = 0; t < daily.size(); ++t) {
    wealth *= 1.0 + daily[t];
    out[t] = wealth - 1.0;
  }
  return out;
}

double MaxDrawdown(std::span<const double> cumulative) {
  double peak = 1.0;
  double worst = 0.0;
  for (double c : cumulative) {
    const double wealth = 1.0 + c;
    peak = std::max(peak, wealth);
    worst = std::max(worst, (peak - wealth) / peak);
  }
  return worst;
}

void ValidatePortfolioSpec(const PortfolioSpec& spec,
                           const MarketDataset& dataset) {
  if (spec.stock_ids.empty()) {
    throw Error(ErrorCode::kInvalidSpec, "portfolio '" + spec.name + "' has no stocks");
  }
  if (spec.factor_ids.empty()) {
    throw Error(ErrorCode::kInvalidSpec, "portfolio '" + spec.name + "' has no factors");
  }
  for (const auto& id : spec.stock_ids) {
    if (!dataset.FindStock(id)) {
      throw Error(ErrorCode::kInvalidSpec, "unknown stock " + id);
    }
  }
  for (const auto& name : spec.factor_ids) {
    if (!dataset.factors().Find(name)) {
      throw Error(ErrorCode::kInvalidSpec, "unknown factor " + name);
    }
  }
  if (!spec.benchmark.sector.empty() &&
      !dataset.sectors().contains(spec.benchmark.sector)) {
    throw Error(ErrorCode::kInvalidSpec, "unknown sector " + spec.benchmark.sector);
  }
}

OutlookCurve Outlook(const MarketDataset& dataset,
                     const std::map<std::string, StockModelSeries>& series,
                     const CyclePartition& partition, const StrategyRule& rule,
                     int horizon) {
  if (horizon < 0) {
    throw Error(ErrorCode::kInvalidArgument, "horizon must be >= 0");
  }
  OutlookCurve out;
  if (horizon == 0 || series.empty()) return out;
  // Predictor days after the period whose predicted day is on the calendar.
  const int available = dataset.day_count() - 1 - partition.period_last();
  if (available <= 0) {
    throw Error(ErrorCode::kHorizonExceedsData,
                "no factor data after the analysis period");
  }
  const int days = std::min(horizon, available);
  out.predicted.assign(days, 0.0);
  out.strategy.assign(days, 0.0);
  for (int k = 0; k < days; ++k) {
    out.target_days.push_back(partition.period_last() + 2 + k);
  }
  for (const auto& [id, s] : series) {
    if (s.cycles.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "no fitted cycle for " + id);
    }
    const TrainedModel& final_model = s.cycles.back().model;
    std::vector<double>& predicted = out.stock_predicted[id];
    for (int k = 0; k < days; ++k) {
      const double p = PredictNextDay(dataset, s.stock_index, final_model,
                                      s.columns, partition.period_last() + 1 + k);
      predicted.push_back(p);
      out.predicted[k] += p;
      out.strategy[k] += rule.Holds(p) ? p : 0.0;
    }
  }
  const double n = static_cast<double>(series.size());
  for (int k = 0; k < days; ++k) {
    out.predicted[k] /= n;
    out.strategy[k] /= n;
  }
  out.cumulative = CumulativeReturns(out.strategy);
  return out;
}

BacktestResult EvaluateBacktest(
    const PortfolioSpec& spec, const MarketDataset& dataset,
    const CyclePartition& partition,
    const std::map<std::string, StockModelSeries>& series, int horizon) {
  BacktestResult result;
  result.spec = spec;
  for (int day = partition.period_first(); day <= partition.period_last(); ++day) {
    result.target_days.push_back(day + 1);
  }
  const std::size_t n_days = result.target_days.size();
  result.portfolio.daily.assign(n_days, 0.0);
  for (const auto& [id, s] : series) {
    ReturnCurve& curve = result.stocks[id];
    curve.daily = StrategyReturns(s, spec.strategy);
    curve.cumulative = CumulativeReturns(curve.daily);
    for (std::size_t t = 0; t < n_days; ++t) result.portfolio.daily[t] += curve.daily[t];
  }
  for (double& r : result.portfolio.daily) r /= static_cast<double>(series.size());
  result.portfolio.cumulative = CumulativeReturns(result.portfolio.daily);
  result.benchmark.daily = MarketBenchmark(dataset, spec.benchmark, partition);
  result.benchmark.cumulative = CumulativeReturns(result.benchmark.daily);

  if (horizon > 0 && dataset.day_count() - 1 - partition.period_last() > 0) {
    result.outlook = Outlook(dataset, series, partition, spec.strategy, horizon);
  }

  BacktestSummary& summary = result.summary;
  summary.period_return = result.portfolio.cumulative.back();
  summary.benchmark_return = result.benchmark.cumulative.back();
  summary.excess_return = summary.period_return - summary.benchmark_return;
  summary.max_drawdown = MaxDrawdown(result.portfolio.cumulative);
  return result;
}

BacktestResult RunBacktest(const PortfolioSpec& spec,
                           const MarketDataset& dataset,
                           const CyclePartition& partition,
                           const BacktestOptions& options) {
  ValidatePortfolioSpec(spec, dataset);
  RollingOptions rolling;
  rolling.model = spec.model;
  rolling.jobs = options.jobs;
  for (const auto& name : spec.factor_ids) {
    rolling.columns.push_back(*dataset.factors().Find(name));
  }
  std::sort(rolling.columns.begin(), rolling.columns.end());
  rolling.columns.erase(std::unique(rolling.columns.begin(), rolling.columns.end()),
                        rolling.columns.end());
  std::vector<std::string> stocks = spec.stock_ids;
  std::sort(stocks.begin(), stocks.end());
  stocks.erase(std::unique(stocks.begin(), stocks.end()), stocks.end());
  const auto series = RollingFit(dataset, stocks, partition, rolling);
  return EvaluateBacktest(spec, dataset, partition, series, options.horizon);
}

}  // namespace factorscope
