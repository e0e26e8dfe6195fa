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

#include "factorscope/rolling.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "factorscope/error.h"
#include "factorscope/parallel.h"

namespace factorscope {
namespace {

void ReadSelected(const PanelSource& panel, std::size_t stock, int day,
                  std::span<const int> columns, std::vector<double>& full,
                  std::span<double> out) {
  full.resize(panel.factor_count());
  panel.ReadFactorRow(stock, day, full);
  for (std::size_t j = 0; j < columns.size(); ++j) out[j] = full[columns[j]];
}

std::vector<int> AllColumns(int count) {
  std::vector<int> columns(count);
  for (int j = 0; j < count; ++j) columns[j] = j;
  return columns;
}

struct Window {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

// Raw factor rows [first_day, last_day] and the returns one day later.
Window ReadWindow(const PanelSource& panel, std::size_t stock, int first_day,
                  int last_day, std::span<const int> columns) {
  const int rows = last_day - first_day + 1;
  if (rows < 2) {
    throw Error(ErrorCode::kTooFewSamples, "training window needs 2 or more days");
  }
  Window w{Eigen::MatrixXd(rows, static_cast<Eigen::Index>(columns.size())),
           Eigen::VectorXd(rows)};
  std::vector<double> full;
  std::vector<double> row(columns.size());
  for (int k = 0; k < rows; ++k) {
    const int day = first_day + k;
    ReadSelected(panel, stock, day, columns, full, row);
    for (std::size_t j = 0; j < columns.size(); ++j) w.x(k, j) = row[j];
    w.y[k] = panel.ReadReturn(stock, day + 1);
  }
  return w;
}

}  // namespace

CyclePartition::CyclePartition(int training_days, int cycle_days, int origin,
                               std::vector<CycleWindow> cycles)
    : training_days_(training_days),
      cycle_days_(cycle_days),
      origin_(origin),
      cycles_(std::move(cycles)) {}

const CycleWindow& CyclePartition::cycle(int index) const {
  if (index < 1 || index > cycle_count()) {
    throw Error(ErrorCode::kUnknownCycle,
                "cycle " + std::to_string(index) + " not in [1, " +
                    std::to_string(cycle_count()) + "]");
  }
  return cycles_[index - 1];
}

CyclePartition PartitionCycles(int training_days, int cycle_days,
                               int period_first, int period_last) {
  if (training_days < 2 || cycle_days < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "training length must be >= 2 and cycle length >= 1");
  }
  const int length = period_last - period_first + 1;
  if (length < cycle_days || length % cycle_days != 0) {
    throw Error(ErrorCode::kIndivisiblePeriod,
                "period of " + std::to_string(length) +
                    " days is not a positive multiple of the cycle length " +
                    std::to_string(cycle_days));
  }
  if (period_first <= training_days) {
    throw Error(ErrorCode::kInsufficientHistory,
                "period starts on day " + std::to_string(period_first) +
                    " but needs " + std::to_string(training_days) +
                    " days of history");
  }
  const int T = training_days;
  const int D = cycle_days;
  std::vector<CycleWindow> cycles;
  for (int i = 1; i <= length / D; ++i) {
    CycleWindow w;
    w.index = i;
    w.train_first = (i - 1) * D + 1;
    w.train_last = (i - 1) * D + T;
    w.target_first = (i - 1) * D + 2;
    w.target_last = (i - 1) * D + T + 1;
    w.trade_first = T + (i - 1) * D + 1;
    w.trade_last = T + i * D;
    cycles.push_back(w);
  }
  return CyclePartition(T, D, period_first - T, std::move(cycles));
}


TrainedModel TrainWindow(const PanelSource& panel, std::size_t stock,
                         int first_day, int last_day,
                         std::span<const int> columns, const ModelSpec& spec) {
  Window w = ReadWindow(panel, stock, first_day, last_day, columns);
  TrainedModel model;
  model.scaler = ColumnScaler::Fit(w.x);
  model.scaler.ApplyInPlace(w.x);
  model.fit = FitModel(w.x, w.y, spec);
  return model;
}

TrainedModel TrainWindow(const PanelSource& panel, std::size_t stock,
                         int first_day, int last_day,
                         std::span<const int> columns,
                         const ElasticNetConfig& config) {
  Window w = ReadWindow(panel, stock, first_day, last_day, columns);
  TrainedModel model;
  model.scaler = ColumnScaler::Fit(w.x);
  model.scaler.ApplyInPlace(w.x);
  model.fit = FitElasticNet(w.x, w.y, config);
  return model;
}

double PredictNextDay(const PanelSource& panel, std::size_t stock,
                      const TrainedModel& model, std::span<const int> columns,
                      int day) {
  std::vector<double> full;
  std::vector<double> row(columns.size());
  ReadSelected(panel, stock, day, columns, full, row);
  model.scaler.ApplyInPlace(row);
  return Predict(model.fit, row);
}

const CycleModel& StockModelSeries::cycle(int index) const {
  if (index < 1 || index > static_cast<int>(cycles.size())) {
    throw Error(ErrorCode::kUnknownCycle,
                "cycle " + std::to_string(index) + " not fitted for " + stock_id);
  }
  return cycles[index - 1];
}

std::map<std::string, StockModelSeries> RollingFit(
    const PanelSource& panel, std::span<const std::string> stock_ids,
    const CyclePartition& partition, const RollingOptions& options) {
  if (partition.cycle_count() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "partition has no cycles");
  }
  if (partition.origin() < 1 || partition.period_last() + 1 > panel.day_count()) {
    throw Error(ErrorCode::kInsufficientHistory,
                "dataset has " + std::to_string(panel.day_count()) +
                    " days; the period needs days " +
                    std::to_string(partition.origin()) + ".." +
                    std::to_string(partition.period_last() + 1));
  }
  const std::vector<int> columns =
      options.columns.empty() ? AllColumns(panel.factor_count()) : options.columns;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] < 0 || columns[j] >= panel.factor_count() ||
        (j > 0 && columns[j] <= columns[j - 1])) {
      throw Error(ErrorCode::kUnknownFactor,
                  "factor columns must be ascending dataset columns");
    }
  }

  std::map<std::string, StockModelSeries> out;
  for (const auto& id : stock_ids) {
    const auto index = panel.FindStock(id);
    if (!index) throw Error(ErrorCode::kUnknownStock, "unknown stock " + id);
    StockModelSeries& series = out[id];
    series.stock_id = id;
    series.stock_index = *index;
    series.columns = columns;
    series.cycles.resize(partition.cycle_count());
  }
  std::vector<StockModelSeries*> ordered;
  for (auto& [id, series] : out) ordered.push_back(&series);

  const std::size_t n_cycles = partition.cycles().size();
  const int D = partition.cycle_days();
  ParallelFor(ordered.size() * n_cycles, options.jobs, [&](std::size_t task) {
    StockModelSeries& series = *ordered[task / n_cycles];
    const CycleWindow& window = partition.cycles()[task % n_cycles];
    CycleModel& cm = series.cycles[task % n_cycles];
    cm.cycle = window.index;
    cm.model = TrainWindow(panel, series.stock_index,
                           partition.ToAbsolute(window.train_first),
                           partition.ToAbsolute(window.train_last), columns,
                           options.model);
    cm.trading_rows.resize(D, static_cast<Eigen::Index>(columns.size()));
    cm.predicted.assign(D, 0.0);
    cm.actual.assign(D, 0.0);
    std::vector<double> full;
    std::vector<double> row(columns.size());
    for (int k = 0; k < D; ++k) {
      const int day = partition.ToAbsolute(window.trade_first + k);
      ReadSelected(panel, series.stock_index, day, columns, full, row);
      cm.model.scaler.ApplyInPlace(row);
      for (std::size_t j = 0; j < columns.size(); ++j) cm.trading_rows(k, j) = row[j];
      cm.predicted[k] = Predict(cm.model.fit, row);
    }
    for (int k = 0; k < D; ++k) {
      const int day = partition.ToAbsolute(window.trade_first + k);
      cm.actual[k] = panel.ReadReturn(series.stock_index, day + 1);
    }
    cm.xi = MeanSquaredError(cm.predicted, cm.actual);
    cm.error_rate = RelativeAbsoluteError(cm.predicted, cm.actual);
  });
  return out;
}

double MeanSquaredError(std::span<const double> predicted,
                        std::span<const double> actual) {
  if (predicted.size() != actual.size() || predicted.empty()) {
    throw Error(ErrorCode::kDimensionMismatch, "prediction/actual length mismatch");
  }
  double ss = 0.0;
  for (std::size_t k = 0; k < predicted.size(); ++k) {
    const double e = predicted[k] - actual[k];
    ss += e * e;
  }
  return ss / static_cast<double>(predicted.size());
}

double RelativeAbsoluteError(std::span<const double> predicted,
                             std::span<const double> actual) {
  if (predicted.size() != actual.size() || predicted.empty()) {
    throw Error(ErrorCode::kDimensionMismatch, "prediction/actual length mismatch");
  }
  double abs_err = 0.0;
  double abs_act = 0.0;
  for (std::size_t k = 0; k < predicted.size(); ++k) {
    abs_err += std::abs(predicted[k] - actual[k]);
    abs_act += std::abs(actual[k]);
  }
  const double n = static_cast<double>(predicted.size());
  return std::clamp((abs_err / n) / (abs_act / n + 1e-9), 0.0, 1.0);
}

double PredictionError(const StockModelSeries& series, int cycle) {
  const CycleModel& cm = series.cycle(cycle);
  return MeanSquaredError(cm.predicted, cm.actual);
}

double ErrorRate(const StockModelSeries& series, int cycle) {
  const CycleModel& cm = series.cycle(cycle);
  return RelativeAbsoluteError(cm.predicted, cm.actual);
}

}  // namespace factorscope
