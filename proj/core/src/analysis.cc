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

#include "factorscope/analysis.h"

#include <algorithm>
#include <string>

#include "factorscope/error.h"
#include "factorscope/parallel.h"

namespace factorscope {
namespace {

ResolvedPeriod ShrinkToCycles(int first, int last, int cycle_days) {
  if (cycle_days < 1) {
    throw Error(ErrorCode::kInvalidArgument, "cycle length must be >= 1");
  }
  ResolvedPeriod out;
  out.first_day = first;
  out.requested_last_day = last;
  const int length = last - first + 1;
  if (length < cycle_days) {
    throw Error(ErrorCode::kIndivisiblePeriod,
                "period of " + std::to_string(std::max(length, 0)) +
                    " trading days is shorter than one cycle of " +
                    std::to_string(cycle_days));
  }
  out.last_day = first + (length / cycle_days) * cycle_days - 1;
  out.adjusted = out.last_day != last;
  return out;
}

void CheckHistory(int first, int training_days) {
  if (first <= training_days) {
    throw Error(ErrorCode::kInsufficientHistory,
                "period starts on trading day " + std::to_string(first) +
                    " but needs " + std::to_string(training_days) +
                    " days of history before it");
  }
}

}  // namespace

std::uint64_t Fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = 14695981039346656037ull ^ seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

ResolvedPeriod ResolvePeriod(const TradingCalendar& calendar,
                             std::optional<Date> start, std::optional<Date> end,
                             int training_days, int cycle_days,
                             int reserve_days) {
  const int n = calendar.size();
  int first = training_days + 1;
  if (start) {
    const auto day = calendar.FirstDayOnOrAfter(*start);
    if (!day) {
      throw Error(ErrorCode::kIndivisiblePeriod,
                  "start date " + FormatIsoDate(*start) + " is after the calendar");
    }
    first = *day;
  }
  CheckHistory(first, training_days);
  // The last predictor day needs the following day's return.
  int last = n - 1;
  if (end) {
    const auto day = calendar.LastDayOnOrBefore(*end);
    if (!day) {
      throw Error(ErrorCode::kIndivisiblePeriod,
                  "end date " + FormatIsoDate(*end) + " is before the calendar");
    }
    last = std::min(*day, n - 1);
  } else if (n - 1 - reserve_days - first + 1 >= cycle_days) {
    last = n - 1 - reserve_days;
  }
  return ShrinkToCycles(first, last, cycle_days);
}

ResolvedPeriod ResolvePeriodDays(int day_count, int first_day, int last_day,
                                 int training_days, int cycle_days) {
  CheckHistory(first_day, training_days);
  return ShrinkToCycles(first_day, std::min(last_day, day_count - 1), cycle_days);
}

std::vector<int> ResolveFactorColumns(const MarketDataset& dataset,
                                      const std::vector<std::string>& names) {
  std::vector<int> columns;
  if (names.empty()) {
    for (int j = 0; j < dataset.factor_count(); ++j) columns.push_back(j);
    return columns;
  }
  for (const auto& name : names) {
    const auto column = dataset.factors().Find(name);
    if (!column) throw Error(ErrorCode::kUnknownFactor, "unknown factor " + name);
    columns.push_back(*column);
  }
  std::sort(columns.begin(), columns.end());
  columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
  return columns;
}

std::vector<std::string> ResolveStocks(const MarketDataset& dataset,
                                       const std::vector<std::string>& stocks,
                                       const std::vector<std::string>& sectors) {
  std::vector<std::string> out;
  if (stocks.empty() && sectors.empty()) {
    for (const auto& s : dataset.stocks()) out.push_back(s.id);
    return out;
  }
  for (const auto& id : stocks) {
    if (!dataset.FindStock(id)) {
      throw Error(ErrorCode::kUnknownStock, "unknown stock " + id);
    }
    out.push_back(id);
  }
  for (const auto& sector : sectors) {
    const auto it = dataset.sectors().find(sector);
    if (it == dataset.sectors().end()) {
      throw Error(ErrorCode::kUnknownStock, "unknown sector " + sector);
    }
    out.insert(out.end(), it->second.begin(), it->second.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

AnalysisResult RunAnalysis(const MarketDataset& dataset,
                           const AnalysisSpec& spec, SensitivityCache* cache,
                           std::uint64_t cache_salt) {
  AnalysisResult result;
  result.spec = spec;
  result.partition = PartitionCycles(spec.training_days, spec.cycle_days,
                                     spec.period_first, spec.period_last);
  RollingOptions rolling;
  rolling.model = spec.model;
  rolling.columns = ResolveFactorColumns(dataset, spec.factors);
  rolling.jobs = spec.jobs;
  std::vector<std::string> stocks = spec.stock_ids;
  std::sort(stocks.begin(), stocks.end());
  stocks.erase(std::unique(stocks.begin(), stocks.end()), stocks.end());
  if (stocks.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "analysis needs at least one stock");
  }
  result.series = RollingFit(dataset, stocks, result.partition, rolling);

  for (const auto& [id, series] : result.series) {
    auto imps = SeriesImportances(series);
    result.importances.insert(result.importances.end(), imps.begin(), imps.end());
    auto stab = SeriesStability(series);
    result.stabilities.insert(result.stabilities.end(), stab.begin(), stab.end());
  }
  for (const CycleWindow& w : result.partition.cycles()) {
    for (MetricKind kind :
         {MetricKind::kWeight, MetricKind::kValue, MetricKind::kContribution}) {
      auto agg = AggregateImportances(result.importances, w.index, kind);
      result.aggregates.insert(result.aggregates.end(), agg.begin(), agg.end());
    }
  }

  if (spec.with_sensitivity) {
    std::string config_text = std::string(ModelVariantName(spec.model.variant)) +
                              "|" + FormatDouble(spec.model.lambda_ratio) + "|" +
                              std::to_string(spec.model.cv_folds) + "|" +
                              FormatDouble(spec.model.solver.tol) + "|" +
                              std::to_string(spec.model.solver.max_sweeps) + "|" +
                              std::to_string(spec.training_days) + "|" +
                              std::to_string(spec.cycle_days) + "|" +
                              std::to_string(result.partition.origin());
    for (int c : rolling.columns) config_text += "," + std::to_string(c);
    const std::uint64_t config_hash = Fnv1a64(config_text, cache_salt);

    struct Task {
      const StockModelSeries* series;
      int cycle;
      int factor;
    };
    std::vector<Task> tasks;
    for (const auto& [id, series] : result.series) {
      for (const CycleModel& cm : series.cycles) {
        for (int factor : series.columns) tasks.push_back({&series, cm.cycle, factor});
      }
    }
    result.sensitivities.resize(tasks.size());
    ParallelFor(tasks.size(), spec.jobs, [&](std::size_t i) {
      const Task& t = tasks[i];
      const SensitivityCache::Key key{t.series->stock_id, t.cycle, t.factor,
                                      config_hash};
      if (cache) {
        if (auto hit = cache->Find(key)) {
          result.sensitivities[i] = *hit;
          return;
        }
      }
      result.sensitivities[i] = FactorSensitivity(
          dataset, *t.series, result.partition, spec.model, t.cycle, t.factor);
      if (cache) cache->Insert(key, result.sensitivities[i]);
    });
  }
  return result;
}

}  // namespace factorscope
