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

#ifndef FACTORSCOPE_BACKTEST_H_
#define FACTORSCOPE_BACKTEST_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "factorscope/elastic_net.h"
#include "factorscope/market_data.h"
#include "factorscope/rolling.h"

namespace factorscope {

inline constexpr int kDefaultHorizonDays = 63;

// Daily position rule applied to the model's prediction for the next day.
// No transaction costs, shorting or sizing.
struct StrategyRule {
  enum class Kind { kLongOrCash, kAlwaysHold, kThreshold };

  Kind kind = Kind::kLongOrCash;
  // kThreshold holds when the prediction exceeds this.
  double threshold = 0.0;

  bool Holds(double predicted_return) const;

  static StrategyRule LongOrCash() { return {}; }
  static StrategyRule AlwaysHold() { return {Kind::kAlwaysHold, 0.0}; }
  static StrategyRule Threshold(double t) { return {Kind::kThreshold, t}; }
};

std::string_view StrategyName(StrategyRule::Kind kind);
std::optional<StrategyRule::Kind> ParseStrategy(std::string_view name);

// Realized strategy returns over the period, one per predicted day, in
// cycle order.
std::vector<double> StrategyReturns(const StockModelSeries& series,
                                    const StrategyRule& rule = {});

// Empty `sector` means the whole market.
struct BenchmarkScope {
  std::string sector;
};

// Equal-weight mean of realized returns over the scope for every target day
// of the partition. Throws kEmptyScope.
std::vector<double> MarketBenchmark(const MarketDataset& dataset,
                                    const BenchmarkScope& scope,
                                    const CyclePartition& partition);

// cumulative[t] = Π_{k<=t}(1 + daily[k]) − 1.
std::vector<double> CumulativeReturns(std::span<const double> daily);

// Largest peak-to-trough loss of the wealth curve 1 + cumulative, as a
// fraction of the peak (starting wealth 1 counts as a peak).
double MaxDrawdown(std::span<const double> cumulative);

struct PortfolioSpec {
  std::string name;
  std::vector<std::string> stock_ids;
  std::vector<std::string> factor_ids;
  ModelSpec model;
  StrategyRule strategy;
  BenchmarkScope benchmark;
};

struct BacktestOptions {
  int horizon = kDefaultHorizonDays;
  int jobs = 1;
};

struct ReturnCurve {
  std::vector<double> daily;
  std::vector<double> cumulative;
};

// Forward prediction past the analysis period using the final cycle's
// model. Never mixed into realized curves.
struct OutlookCurve {
  std::vector<int> target_days;  // absolute days being predicted
  std::vector<double> predicted;  // equal-weight mean of raw predictions
  std::vector<double> strategy;   // equal-weight mean of rule-filtered ones
  std::vector<double> cumulative;  // compounded `strategy`
  std::map<std::string, std::vector<double>> stock_predicted;
};

struct BacktestSummary {
  double period_return = 0.0;
  double benchmark_return = 0.0;
  double excess_return = 0.0;
  double max_drawdown = 0.0;
};

struct BacktestResult {
  PortfolioSpec spec;
  std::vector<int> target_days;  // absolute days of the realized curves
  std::map<std::string, ReturnCurve> stocks;
  ReturnCurve portfolio;
  ReturnCurve benchmark;
  OutlookCurve outlook;
  BacktestSummary summary;
};

// Throws kInvalidSpec for empty or unknown stocks/factors.
void ValidatePortfolioSpec(const PortfolioSpec& spec,
                           const MarketDataset& dataset);

// Outlook over at most `horizon` days after the period; the horizon is
// capped at the data available. Throws kHorizonExceedsData when no day
// after the period can be predicted.
OutlookCurve Outlook(const MarketDataset& dataset,
                     const std::map<std::string, StockModelSeries>& series,
                     const CyclePartition& partition,
                     const StrategyRule& rule, int horizon);

// Refits the portfolio's stocks restricted to its factors and evaluates.
BacktestResult RunBacktest(const PortfolioSpec& spec,
                           const MarketDataset& dataset,
                           const CyclePartition& partition,
                           const BacktestOptions& options = {});

// Evaluation half of RunBacktest, on already fitted series.
BacktestResult EvaluateBacktest(
    const PortfolioSpec& spec, const MarketDataset& dataset,
    const CyclePartition& partition,
    const std::map<std::string, StockModelSeries>& series, int horizon);

}  // namespace factorscope

#endif  // FACTORSCOPE_BACKTEST_H_
