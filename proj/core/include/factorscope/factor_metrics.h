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

#ifndef FACTORSCOPE_FACTOR_METRICS_H_
#define FACTORSCOPE_FACTOR_METRICS_H_

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "factorscope/elastic_net.h"
#include "factorscope/market_data.h"
#include "factorscope/rolling.h"

namespace factorscope {

enum class MetricKind { kWeight, kValue, kContribution };

std::string_view MetricKindName(MetricKind kind);
std::optional<MetricKind> ParseMetricKind(std::string_view name);

// Per stock × cycle × factor. `factor` is the dataset column.
struct FactorImportance {
  std::string stock_id;
  int cycle = 0;
  int factor = 0;
  double weight = 0.0;
  double mean_value = 0.0;    // mean normalized value over trading days
  double contribution = 0.0;  // weight · Σ normalized values

  double Metric(MetricKind kind) const;
};

struct SensitivityScore {
  std::string stock_id;
  int cycle = 0;
  int factor = 0;
  double xi = 0.0;
  double xi_without = 0.0;
  double sensitivity = 0.0;  // max(xi_without − xi, 0)
};

struct StabilityScore {
  std::string stock_id;
  int factor = 0;
  int flips = 0;
};

struct AggregateImportance {
  int cycle = 0;
  int factor = 0;
  MetricKind kind = MetricKind::kContribution;
  double positive_mass = 0.0;
  double negative_mass = 0.0;
};

// Throws kUnknownCycle / kUnknownFactor (factor not among the series'
// fitted columns).
FactorImportance FactorContribution(const StockModelSeries& series, int cycle,
                                    int factor);

// All importances of a series, cycle-major then in column order.
std::vector<FactorImportance> SeriesImportances(const StockModelSeries& series);

// Contributions smaller than this in magnitude carry the previous sign.
inline constexpr double kSignEpsilon = 1e-12;

// Sign flips along a per-cycle contribution series.
int CountSignFlips(std::span<const double> contributions);

// One score per fitted column of the series.
std::vector<StabilityScore> SeriesStability(const StockModelSeries& series);

struct SensitivityOptions {
  // A factor with zero weight cannot change the optimum when removed, so
  // its refit is skipped and the score is exactly 0.
  bool skip_inactive = true;
};

// Refits cycle `cycle` without `factor`, reusing the original lambda, and
// scores the rise in prediction error on the same trading days.
SensitivityScore FactorSensitivity(const PanelSource& panel,
                                   const StockModelSeries& series,
                                   const CyclePartition& partition,
                                   const ModelSpec& spec, int cycle, int factor,
                                   const SensitivityOptions& options = {});

// Per factor: sums of positive and negative parts of the chosen metric
// across the given importances that belong to `cycle`. Factors are emitted
// in ascending column order.
std::vector<AggregateImportance> AggregateImportances(
    std::span<const FactorImportance> importances, int cycle, MetricKind kind);

enum class Polarity { kPositive, kNegative };

struct RankedFactor {
  int factor = 0;
  double magnitude = 0.0;  // |contribution|
};

struct TopFactors {
  std::vector<RankedFactor> factors;
  double remainder = 0.0;  // Σ |contribution| of same-polarity factors left out
};

// Factors of one polarity from one stock × cycle, ordered by |contribution|
// descending with ties broken by column (registry) order.
TopFactors TopKFactors(std::span<const FactorImportance> importances, int k,
                       Polarity polarity);

// Thread-safe memo for sensitivity scores. Concurrent inserts of the same
// key are idempotent: the first stored value wins.
class SensitivityCache {
 public:
  struct Key {
    std::string stock_id;
    int cycle = 0;
    int factor = 0;
    std::uint64_t config_hash = 0;

    auto operator<=>(const Key&) const = default;
  };

  std::optional<SensitivityScore> Find(const Key& key) const;
  void Insert(const Key& key, const SensitivityScore& score);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<Key, SensitivityScore> scores_;
};

}  // namespace factorscope

#endif  // FACTORSCOPE_FACTOR_METRICS_H_
