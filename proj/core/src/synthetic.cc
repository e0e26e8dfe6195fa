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

#include "factorscope/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>

#include "factorscope/error.h"

namespace factorscope {
namespace {

void Require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidConfig, what);
}

std::vector<Date> BusinessDays(Date start, int count) {
  using std::chrono::sys_days;
  using std::chrono::weekday;
  std::vector<Date> dates;
  dates.reserve(count);
  sys_days day{start};
  while (static_cast<int>(dates.size()) < count) {
    const weekday wd{day};
    if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) {
      dates.emplace_back(day);
    }
    day += std::chrono::days{1};
  }
  return dates;
}

std::string StockId(int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06d.SH", 600000 + i);
  return buf;
}

std::string SectorName(int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "Sector%02d", i + 1);
  return buf;
}

}  // namespace

double PlantedModel::WeightAt(const std::string& stock, int column,
                              int day) const {
  const double base = weights.at(stock).at(column);
  return base * (1.0 + drift * static_cast<double>(day - 1) /
                           static_cast<double>(cycle_days));
}

SyntheticData GenerateSynthetic(const SyntheticConfig& config) {
  const FactorRegistry& registry = FactorRegistry::Default();
  const int F = config.factor_count;
  Require(config.n_stocks >= 1, "n_stocks must be >= 1");
  Require(config.n_sectors >= 1 && config.n_sectors <= config.n_stocks,
          "n_sectors must be in [1, n_stocks]");
  Require(F >= 1 && F <= static_cast<int>(registry.size()),
          "factor count must be in [1, " + std::to_string(registry.size()) + "]");
  Require(config.sparsity >= 0 && config.sparsity <= F,
          "sparsity must be in [0, factor count]");
  Require(config.noise_sigma >= 0.0 && std::isfinite(config.noise_sigma),
          "noise_sigma must be finite and >= 0");
  Require(config.training_days >= 2 && config.cycle_days >= 1,
          "training_days >= 2 and cycle_days >= 1 required");
  Require(config.n_days > config.training_days + config.cycle_days,
          "n_days must exceed training_days + cycle_days");
  Require(config.return_scale > 0.0 && std::isfinite(config.return_scale),
          "return_scale must be positive");
  Require(std::isfinite(config.drift) && std::isfinite(config.weight_magnitude),
          "drift and weight magnitude must be finite");
  Require(config.start_date.ok(), "invalid start date");

  std::mt19937_64 rng(config.seed);

  std::vector<int> support = config.support;
  if (support.empty()) {
    std::vector<int> all(F);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    support.assign(all.begin(), all.begin() + config.sparsity);
  }
  Require(static_cast<int>(support.size()) == config.sparsity,
          "explicit support must list exactly `sparsity` factors");
  std::sort(support.begin(), support.end());
  Require(std::adjacent_find(support.begin(), support.end()) == support.end(),
          "support entries must be distinct");
  Require(support.empty() || (support.front() >= 0 && support.back() < F),
          "support entries must be factor columns");

  PlantedModel planted;
  planted.support = support;
  planted.drift = config.drift;
  planted.return_scale = config.return_scale;
  planted.cycle_days = config.cycle_days;
  for (int j = 0; j < F; ++j) planted.factor_names.push_back(registry.factors()[j].name);

  const int n_days = config.n_days;
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> standard(0.0, 1.0);

  std::vector<StockRecord> stocks(config.n_stocks);
  FactorPanel panel;
  panel.names = planted.factor_names;
  for (int j = 0; j < F; ++j) panel.types.push_back(registry.factors()[j].type);

  for (int i = 0; i < config.n_stocks; ++i) {
    StockRecord& stock = stocks[i];
    stock.id = StockId(i);
    stock.sector = SectorName(i % config.n_sectors);
    std::vector<double> w(F, 0.0);
    for (int j : support) {
      const bool negative = config.random_signs && coin(rng);
      w[j] = negative ? -config.weight_magnitude : config.weight_magnitude;
    }
    planted.weights[stock.id] = w;
  }
  for (int i = 0; i < config.n_stocks; ++i) {
    Eigen::MatrixXd x(n_days, F);
    for (int t = 0; t < n_days; ++t) {
      for (int j = 0; j < F; ++j) x(t, j) = standard(rng);
    }
    panel.values.push_back(std::move(x));
  }
  for (int i = 0; i < config.n_stocks; ++i) {
    StockRecord& stock = stocks[i];
    const Eigen::MatrixXd& x = panel.values[i];
    stock.close.assign(n_days, 0.0);
    stock.close[0] = 100.0;
    for (int day = 1; day < n_days; ++day) {
      // Return of day + 1 is driven by the factor row of `day`.
      double signal = 0.0;
      for (int j : support) signal += planted.WeightAt(stock.id, j, day) * x(day - 1, j);
      const double noise =
          config.noise_sigma > 0.0 ? config.noise_sigma * standard(rng) : 0.0;
      const double y = config.return_scale * (signal + noise);
      stock.close[day] = stock.close[day - 1] * (1.0 + y);
      Require(stock.close[day] > 0.0 && std::isfinite(stock.close[day]),
              "generated close is not positive; lower return_scale");
    }
  }

  TradingCalendar calendar(BusinessDays(config.start_date, n_days));
  return SyntheticData{
      MarketDataset(std::move(calendar), std::move(stocks), std::move(panel)),
      std::move(planted)};
}

}  // namespace factorscope
