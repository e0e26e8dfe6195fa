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

#include "factorscope/factor_metrics.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "factorscope/error.h"

namespace factorscope {
namespace {

int ColumnPosition(const StockModelSeries& series, int factor) {
  const auto it = std::find(series.columns.begin(), series.columns.end(), factor);
  if (it == series.columns.end()) {
    throw Error(ErrorCode::kUnknownFactor,
                "factor column " + std::to_string(factor) +
                    " is not part of the model for " + series.stock_id);
  }
  return static_cast<int>(it - series.columns.begin());
}

}  // namespace

std::string_view MetricKindName(MetricKind kind) {
  switch (kind) {
    case MetricKind::kWeight:
      return "weight";
    case MetricKind::kValue:
      return "value";
    case MetricKind::kContribution:
      return "contribution";
  }
  return "contribution";
}

std::optional<MetricKind> ParseMetricKind(std::string_view name) {
  if (name == "weight") return MetricKind::kWeight;
  if (name == "value") return MetricKind::kValue;
  if (name == "contribution") return MetricKind::kContribution;
  return std::nullopt;
}

double FactorImportance::Metric(MetricKind kind) const {
  switch (kind) {
    case MetricKind::kWeight:
      return weight;
    case MetricKind::kValue:
      return mean_value;
    case MetricKind::kContribution:
      return contribution;
  }
  return contribution;
}

FactorImportance FactorContribution(const StockModelSeries& series, int cycle,
                                    int factor) {
  const CycleModel& cm = series.cycle(cycle);
  const int pos = ColumnPosition(series, factor);
  FactorImportance out;
  out.stock_id = series.stock_id;
  out.cycle = cycle;
  out.factor = factor;
  out.weight = cm.model.fit.weights[pos];
  double sum = 0.0;
  double contribution = 0.0;
  for (Eigen::Index k = 0; k < cm.trading_rows.rows(); ++k) {
    const double x = cm.trading_rows(k, pos);
    sum += x;
    contribution += out.weight * x;
  }
  out.mean_value = sum / static_cast<double>(cm.trading_rows.rows());
  out.contribution = contribution;
  return out;
}

std::vector<FactorImportance> SeriesImportances(const StockModelSeries& series) {
  std::vector<FactorImportance> out;
  out.reserve(series.cycles.size() * series.columns.size());
  for (const CycleModel& cm : series.cycles) {
    for (int factor : series.columns) {
      out.push_back(FactorContribution(series, cm.cycle, factor));
    }
  }
  return out;
}

int CountSignFlips(std::span<const double> contributions) {
  int flips = 0;
  int last_sign = 0;
  for (double c : contributions) {
    if (!(std::abs(c) >= kSignEpsilon)) continue;
    const int sign = c > 0.0 ? 1 : -1;
    if (last_sign != 0 && sign != last_sign) ++flips;
    last_sign = sign;
  }
  return flips;
}

std::vector<StabilityScore> SeriesStability(const StockModelSeries& series) {
  std::vector<StabilityScore> out;
  std::vector<double> contributions(series.cycles.size());
  for (int factor : series.columns) {
    for (std::size_t i = 0; i < series.cycles.size(); ++i) {
      contributions[i] =
          FactorContribution(series, series.cycles[i].cycle, factor).contribution;
    }
    out.push_back({series.stock_id, factor, CountSignFlips(contributions)});
  }
  return out;
}

SensitivityScore FactorSensitivity(const PanelSource& panel,
                                   const StockModelSeries& series,
                                   const CyclePartition& partition,
                                   const ModelSpec& spec, int cycle, int factor,
                                   const SensitivityOptions& options) {
  const CycleModel& cm = series.cycle(cycle);
  const int pos = ColumnPosition(series, factor);
  SensitivityScore out;
  out.stock_id = series.stock_id;
  out.cycle = cycle;
  out.factor = factor;
  out.xi = cm.xi;
  if (options.skip_inactive && cm.model.fit.weights[pos] == 0.0) {
    out.xi_without = cm.xi;
    return out;
  }

  std::vector<int> reduced;
  for (int c : series.columns) {
    if (c != factor) reduced.push_back(c);
  }
  const CycleWindow& window = partition.cycle(cycle);
  ElasticNetConfig config;
  config.alpha = cm.model.fit.alpha;
  config.lambda = cm.model.fit.lambda_used;
  config.solver = spec.solver;
  const TrainedModel refit = TrainWindow(
      panel, series.stock_index, partition.ToAbsolute(window.train_first),
      partition.ToAbsolute(window.train_last), reduced, config);

  std::vector<double> predicted(cm.actual.size());
  for (std::size_t k = 0; k < predicted.size(); ++k) {
    const int day = partition.ToAbsolute(window.trade_first) + static_cast<int>(k);
    predicted[k] = PredictNextDay(panel, series.stock_index, refit, reduced, day);
  }
  out.xi_without = MeanSquaredError(predicted, cm.actual);
  out.sensitivity = std::max(out.xi_without - out.xi, 0.0);
  return out;
}

std::vector<AggregateImportance> AggregateImportances(
    std::span<const FactorImportance> importances, int cycle, MetricKind kind) {
  std::map<int, AggregateImportance> by_factor;
  for (const FactorImportance& imp : importances) {
    if (imp.cycle != cycle) continue;
    AggregateImportance& agg = by_factor[imp.factor];
    agg.cycle = cycle;
    agg.factor = imp.factor;
    agg.kind = kind;
    const double v = imp.Metric(kind);
    if (v > 0.0) {
      agg.positive_mass += v;
    } else {
      agg.negative_mass += v;
    }
  }
  std::vector<AggregateImportance> out;
  out.reserve(by_factor.size());
  for (auto& [factor, agg] : by_factor) out.push_back(agg);
  return out;
}

TopFactors TopKFactors(std::span<const FactorImportance> importances, int k,
                       Polarity polarity) {
  std::vector<RankedFactor> ranked;
  for (const FactorImportance& imp : importances) {
    const bool match = polarity == Polarity::kPositive ? imp.contribution > 0.0
                                                       : imp.contribution < 0.0;
    if (match) ranked.push_back({imp.factor, std::abs(imp.contribution)});
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const RankedFactor& a, const RankedFactor& b) {
              if (a.magnitude != b.magnitude) return a.magnitude > b.magnitude;
              return a.factor < b.factor;
            });
  TopFactors out;
  const std::size_t keep = std::min<std::size_t>(ranked.size(), std::max(k, 0));
  out.factors.assign(ranked.begin(), ranked.begin() + keep);
  for (std::size_t i = keep; i < ranked.size(); ++i) {
    out.remainder += ranked[i].magnitude;
  }
  return out;
}

std::optional<SensitivityScore> SensitivityCache::Find(const Key& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  const auto it = scores_.find(key);
  if (it == scores_.end()) return std::nullopt;
  return it->second;
}

void SensitivityCache::Insert(const Key& key, const SensitivityScore& score) {
  std::lock_guard<std::mutex> lock(mu_);
  scores_.try_emplace(key, score);
}

std::size_t SensitivityCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return scores_.size();
}

}  // namespace factorscope
