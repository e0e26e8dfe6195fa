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

#ifndef FACTORSCOPE_ROLLING_H_
#define FACTORSCOPE_ROLLING_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "factorscope/elastic_net.h"
#include "factorscope/market_data.h"
#include "factorscope/normalize.h"

namespace factorscope {

inline constexpr int kDefaultTrainingDays = 200;
inline constexpr int kDefaultCycleDays = 21;

// Day ranges of one trading cycle, 1-based and relative to the partition
// origin. Cycle i fits factor rows [train_first, train_last] against returns
// [target_first, target_last] (one day later), then on each trading day k
// predicts the return of day k + 1 from the factor row of day k.
struct CycleWindow {
  int index = 0;  // 1-based
  int train_first = 0;
  int train_last = 0;
  int target_first = 0;
  int target_last = 0;
  int trade_first = 0;
  int trade_last = 0;
};

class CyclePartition {
 public:
  CyclePartition() = default;
  CyclePartition(int training_days, int cycle_days, int origin,
                 std::vector<CycleWindow> cycles);

  int training_days() const { return training_days_; }
  int cycle_days() const { return cycle_days_; }
  int cycle_count() const { return static_cast<int>(cycles_.size()); }
  int analysis_days() const { return cycle_days_ * cycle_count(); }
  // Absolute calendar day of relative day 1.
  int origin() const { return origin_; }
  const std::vector<CycleWindow>& cycles() const { return cycles_; }
  // Throws kUnknownCycle.
  const CycleWindow& cycle(int index) const;

  int ToAbsolute(int relative_day) const { return origin_ + relative_day - 1; }
  // First and last trading (predictor) day of the period, absolute.
  int period_first() const { return ToAbsolute(training_days_ + 1); }
  int period_last() const {
    return ToAbsolute(training_days_ + analysis_days());
  }

 private:
  int training_days_ = 0;
  int cycle_days_ = 0;
  int origin_ = 1;
  std::vector<CycleWindow> cycles_;
};

// Splits the absolute day range [period_first, period_last] into cycles of
// `cycle_days`. Throws kIndivisiblePeriod or kInsufficientHistory.
CyclePartition PartitionCycles(int training_days, int cycle_days,
                               int period_first, int period_last);

// A fitted model plus the training-window statistics needed to normalize
// any later factor row for it.
struct TrainedModel {
  FitResult fit;
  ColumnScaler scaler;
};

// Fits one stock on absolute training rows [first_day, last_day] against
// returns one day later, restricted to `columns`.
TrainedModel TrainWindow(const PanelSource& panel, std::size_t stock,
                         int first_day, int last_day,
                         std::span<const int> columns, const ModelSpec& spec);

// Same window, fitted at a fixed lambda/alpha instead of a model variant.
TrainedModel TrainWindow(const PanelSource& panel, std::size_t stock,
                         int first_day, int last_day,
                         std::span<const int> columns,
                         const ElasticNetConfig& config);

// Predicted return of day + 1. Reads only the factor row of `day`.
double PredictNextDay(const PanelSource& panel, std::size_t stock,
                      const TrainedModel& model, std::span<const int> columns,
                      int day);

struct CycleModel {
  int cycle = 0;
  TrainedModel model;
  // D × F' normalized factor rows of the cycle's trading days, exactly as
  // the predictor consumed them.
  Eigen::MatrixXd trading_rows;
  std::vector<double> predicted;  // predicted[k]: return of trade_first+k+1
  std::vector<double> actual;
  double xi = 0.0;          // mean squared prediction error
  double error_rate = 0.0;  // relative MAE clamped to [0, 1]
};

struct StockModelSeries {
  std::string stock_id;
  std::size_t stock_index = 0;
  // Dataset factor columns used by every model, ascending.
  std::vector<int> columns;
  std::vector<CycleModel> cycles;

  // Throws kUnknownCycle.
  const CycleModel& cycle(int index) const;
};

struct RollingOptions {
  ModelSpec model;
  // Dataset factor columns to fit on; empty means all.
  std::vector<int> columns;
  int jobs = 1;
};

// Fits every stock × cycle. Output is keyed (and therefore ordered) by
// stock id and is identical for any `jobs`.
std::map<std::string, StockModelSeries> RollingFit(
    const PanelSource& panel, std::span<const std::string> stock_ids,
    const CyclePartition& partition, const RollingOptions& options);

// Mean squared error over the cycle's predicted days. Throws kUnknownCycle.
double PredictionError(const StockModelSeries& series, int cycle);

// mean|pred − actual| / (mean|actual| + 1e-9), clamped to [0, 1].
double ErrorRate(const StockModelSeries& series, int cycle);

double MeanSquaredError(std::span<const double> predicted,
                        std::span<const double> actual);
double RelativeAbsoluteError(std::span<const double> predicted,
                             std::span<const double> actual);

}  // namespace factorscope

#endif  // FACTORSCOPE_ROLLING_H_
