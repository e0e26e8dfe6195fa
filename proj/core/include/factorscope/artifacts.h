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

#ifndef FACTORSCOPE_ARTIFACTS_H_
#define FACTORSCOPE_ARTIFACTS_H_

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "factorscope/analysis.h"
#include "factorscope/backtest.h"
#include "factorscope/market_data.h"
#include "factorscope/synthetic.h"

// JSON and CSV renderings shared by the CLI and the HTTP service, so both
// emit byte-identical documents for the same computation. Object keys are
// sorted and doubles use the shortest round-trip form.
namespace factorscope {

using Json = nlohmann::json;

std::string DumpJson(const Json& value);

Json PartitionJson(const CyclePartition& partition,
                   const TradingCalendar& calendar);

// Per stock × cycle: sparse weights, bias, lambda, xi, error rate.
Json ModelsJson(const AnalysisResult& result, const MarketDataset& dataset);

// Importance, sensitivity and stability arrays keyed by stock/cycle/factor.
Json MetricsJson(const AnalysisResult& result, const MarketDataset& dataset);

Json AggregatesJson(const AnalysisResult& result, const MarketDataset& dataset);

Json PortfolioSpecJson(const PortfolioSpec& spec);
Json BacktestJson(const BacktestResult& result, const MarketDataset& dataset);

// Columns date,portfolio,benchmark,outlook. Realized rows come first, then
// outlook rows.
std::string CurvesCsv(const BacktestResult& result,
                      const MarketDataset& dataset);

Json PlantedWeightsJson(const PlantedModel& planted, std::uint64_t seed);

Json DatasetSummaryJson(const MarketDataset& dataset);

}  // namespace factorscope

#endif  // FACTORSCOPE_ARTIFACTS_H_
