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

#ifndef FACTORSCOPE_ANALYSIS_H_
#define FACTORSCOPE_ANALYSIS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "factorscope/backtest.h"
#include "factorscope/date.h"
#include "factorscope/elastic_net.h"
#include "factorscope/factor_metrics.h"
#include "factorscope/market_data.h"
#include "factorscope/rolling.h"

namespace factorscope {

// A trading period resolved against the calendar and shrunk so that its
// length is a whole number of cycles.
struct ResolvedPeriod {
  int first_day = 0;
  int last_day = 0;
  bool adjusted = false;
  // Last day before shrinking to whole cycles.
  int requested_last_day = 0;
};

// Maps optional dates onto trading days. Missing start defaults to the
// first day with `training_days` of history; missing end defaults to the
// latest day that leaves `reserve_days` of data after the period (falling
// back to none). The end is then moved down to a multiple of `cycle_days`.
// Throws kInsufficientHistory or kIndivisiblePeriod when nothing remains.
ResolvedPeriod ResolvePeriod(const TradingCalendar& calendar,
                             std::optional<Date> start, std::optional<Date> end,
                             int training_days, int cycle_days,
                             int reserve_days = 0);

// Same, for explicit day indices.
ResolvedPeriod ResolvePeriodDays(int day_count, int first_day, int last_day,
                                 int training_days, int cycle_days);

struct AnalysisSpec {
  std::vector<std::string> stock_ids;
  int period_first = 0;
  int period_last = 0;
  int training_days = kDefaultTrainingDays;
  int cycle_days = kDefaultCycleDays;
  ModelSpec model;
  // Factor names to fit on; empty means all.
  std::vector<std::string> factors;
  bool with_sensitivity = false;
  int jobs = 1;
};

struct AnalysisResult {
  AnalysisSpec spec;
  CyclePartition partition;
  std::map<std::string, StockModelSeries> series;
  std::vector<FactorImportance> importances;
  std::vector<SensitivityScore> sensitivities;
  std::vector<StabilityScore> stabilities;
  // Over all requested stocks, for every cycle and metric kind.
  std::vector<AggregateImportance> aggregates;
};

// Resolves factor names (or all factors when empty) to dataset columns.
// Throws kUnknownFactor.
std::vector<int> ResolveFactorColumns(const MarketDataset& dataset,
                                      const std::vector<std::string>& names);

// Expands stock ids and sector names into a sorted unique id list.
// Throws kUnknownStock.
std::vector<std::string> ResolveStocks(const MarketDataset& dataset,
                                       const std::vector<std::string>& stocks,
                                       const std::vector<std::string>& sectors);

// Partition, rolling fit, importance/stability metrics, and (optionally)
// sensitivity. `cache` may be null; `cache_salt` distinguishes datasets.
AnalysisResult RunAnalysis(const MarketDataset& dataset,
                           const AnalysisSpec& spec,
                           SensitivityCache* cache = nullptr,
                           std::uint64_t cache_salt = 0);

// 64-bit FNV-1a; stable across platforms and runs.
std::uint64_t Fnv1a64(std::string_view bytes, std::uint64_t seed = 0);

}  // namespace factorscope

#endif  // FACTORSCOPE_ANALYSIS_H_
