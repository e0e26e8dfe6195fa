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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "factorscope/synthetic.h"
#include "fixtures.h"
#include "oracles.h"
#include "test_util.h"

namespace factorscope {
namespace {

using testing::kSmallD;
using testing::kSmallLast;
using testing::SmallConfig;
using testing::SmallPartition;

StockModelSeries ToySeries(std::vector<double> predicted, std::vector<double> actual) {
  StockModelSeries s;
  s.stock_id = "T";
  CycleModel cm;
  cm.cycle = 1;
  cm.predicted = std::move(predicted);
  cm.actual = std::move(actual);
  s.cycles.push_back(cm);
  return s;
}

PortfolioSpec SpecFor(const SyntheticData& data, std::vector<std::string> factors = {}) {
  PortfolioSpec spec;
  spec.name = "p";
  for (const auto& s : data.dataset.stocks()) spec.stock_ids.push_back(s.id);
  spec.factor_ids = factors.empty() ? data.dataset.factors().names : factors;
  return spec;
}

std::vector<std::string> PlantedNames(const SyntheticData& data) {
  std::vector<std::string> names;
  for (int j : data.planted.support) names.push_back(data.planted.factor_names[j]);
  return names;
}

TEST(StrategyTest, Rules) {
  EXPECT_TRUE(StrategyRule::LongOrCash().Holds(0.001));
  EXPECT_FALSE(StrategyRule::LongOrCash().Holds(0.0));
  EXPECT_TRUE(StrategyRule::AlwaysHold().Holds(-1.0));
  EXPECT_TRUE(StrategyRule::Threshold(0.01).Holds(0.02));
  EXPECT_FALSE(StrategyRule::Threshold(0.01).Holds(0.01));
  for (auto kind : {StrategyRule::Kind::kLongOrCash, StrategyRule::Kind::kAlwaysHold,
                    StrategyRule::Kind::kThreshold}) {
    EXPECT_EQ(ParseStrategy(StrategyName(kind)), kind);
  }
  EXPECT_FALSE(ParseStrategy("short"));
}

TEST(StrategyTest, LongOrCashOnToySeries) {
  const std::vector<double> actual{0.02, -0.01, 0.03};
  EXPECT_EQ(StrategyReturns(ToySeries({0.1, 0.2, 0.3}, actual)), actual);
  EXPECT_EQ(StrategyReturns(ToySeries({0.0, -0.2, -0.3}, actual)),
            (std::vector<double>{0.0, 0.0, 0.0}));
  // Hold on days 1 and 3 only.
  EXPECT_EQ(StrategyReturns(ToySeries({0.01, -0.01, 0.005}, actual)),
            (std::vector<double>{0.02, 0.0, 0.03}));
  EXPECT_EQ(StrategyReturns(ToySeries({0.01, -0.01, 0.005}, actual),
                            StrategyRule::Threshold(0.007)),
            (std::vector<double>{0.02, 0.0, 0.0}));
}

TEST(CurveTest, CompoundingAndDrawdownMatchOracles) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 0.02);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> daily(1 + trial % 40);
    for (double& r : daily) r = normal(rng);
    const std::vector<double> cum = CumulativeReturns(daily);
    for (std::size_t t = 0; t < daily.size(); ++t) {
      EXPECT_NEAR(cum[t], oracle::Compound(std::span(daily).first(t + 1)), 1e-12);
    }
    EXPECT_NEAR(MaxDrawdown(cum), oracle::BruteForceMaxDrawdown(cum), 1e-12);
  }
  EXPECT_EQ(MaxDrawdown(std::vector<double>{0.1, 0.2}), 0.0);
  EXPECT_NEAR(MaxDrawdown(std::vector<double>{-0.5}), 0.5, 1e-15);
}

TEST(BenchmarkTest, EqualWeightMeanOverScope) {
  const SyntheticData data = GenerateSynthetic(SmallConfig());
  const MarketDataset& ds = data.dataset;
  const CyclePartition partition = SmallPartition();
  const std::vector<double> market = MarketBenchmark(ds, {}, partition);
  ASSERT_EQ(static_cast<int>(market.size()), partition.analysis_days());
  std::vector<double> weighted(market.size(), 0.0);
  for (const auto& [sector, members] : ds.sectors()) {
    const std::vector<double> bench = MarketBenchmark(ds, {sector}, partition);
    for (std::size_t t = 0; t < bench.size(); ++t) {
      const int day = partition.period_first() + static_cast<int>(t) + 1;
      double sum = 0.0;
      for (const auto& id : members) sum += ds.stock(*ds.FindStock(id)).ReturnOn(day);
      EXPECT_NEAR(bench[t], sum / static_cast<double>(members.size()), 1e-15);
      weighted[t] += bench[t] * static_cast<double>(members.size());
    }
  }
  for (std::size_t t = 0; t < market.size(); ++t) {
    EXPECT_NEAR(market[t], weighted[t] / static_cast<double>(ds.stocks().size()), 1e-15);
  }
  EXPECT_ERROR_CODE(MarketBenchmark(ds, {"Nowhere"}, partition), ErrorCode::kEmptyScope);
}

TEST(BacktestTest, PortfolioIsMeanOfMembersAndCurvesCompound) {
  const SyntheticData data = GenerateSynthetic(SmallConfig());
  const BacktestResult r = RunBacktest(SpecFor(data), data.dataset, SmallPartition());
  ASSERT_EQ(r.stocks.size(), 4u);
  ASSERT_EQ(static_cast<int>(r.target_days.size()), SmallPartition().analysis_days());
  EXPECT_EQ(r.target_days.front(), SmallPartition().period_first() + 1);
  for (std::size_t t = 0; t < r.target_days.size(); ++t) {
    double mean = 0.0;
    for (const auto& [id, curve] : r.stocks) mean += curve.daily[t];
    EXPECT_NEAR(r.portfolio.daily[t], mean / 4.0, 1e-15);
  }
  for (const ReturnCurve* curve : {&r.portfolio, &r.benchmark, &r.stocks.begin()->second}) {
    for (std::size_t t = 0; t < curve->daily.size(); ++t) {
      EXPECT_NEAR(curve->cumulative[t],
                  oracle::Compound(std::span(curve->daily).first(t + 1)), 1e-12);
    }
  }
  EXPECT_EQ(r.summary.period_return, r.portfolio.cumulative.back());
  EXPECT_EQ(r.summary.excess_return, r.summary.period_return - r.summary.benchmark_return);
  EXPECT_NEAR(r.summary.max_drawdown,
              oracle::BruteForceMaxDrawdown(r.portfolio.cumulative), 1e-12);
}

TEST(BacktestTest, AlwaysHoldSingleStockTracksTheStock) {
  const SyntheticData data = GenerateSynthetic(SmallConfig());
  PortfolioSpec spec = SpecFor(data);
  spec.stock_ids = {data.dataset.stock(1).id};
  spec.strategy = StrategyRule::AlwaysHold();
  const CyclePartition partition = SmallPartition();
  const BacktestResult r = RunBacktest(spec, data.dataset, partition);
  std::vector<double> actual;
  for (int day = partition.period_first(); day <= partition.period_last(); ++day) {
    actual.push_back(data.dataset.stock(1).ReturnOn(day + 1));
  }
  EXPECT_EQ(r.portfolio.daily, actual);
  EXPECT_NEAR(r.portfolio.cumulative.back(), oracle::Compound(actual), 1e-12);
}

TEST(BacktestTest, LongOrCashDominatesOnNoiselessData) {
  SyntheticConfig config = SmallConfig();
  config.noise_sigma = 0.0;
  const SyntheticData data = GenerateSynthetic(config);
  PortfolioSpec spec = SpecFor(data, PlantedNames(data));
  spec.model.lambda_ratio = 0.0;
  const BacktestResult filtered = RunBacktest(spec, data.dataset, SmallPartition());
  spec.strategy = StrategyRule::AlwaysHold();
  const BacktestResult held = RunBacktest(spec, data.dataset, SmallPartition());
  EXPECT_GE(filtered.summary.period_return, held.summary.period_return);
  EXPECT_GT(filtered.summary.excess_return, 0.0);
}

TEST(OutlookTest, NoiselessOutlookMatchesRealizedReturns) {
  SyntheticConfig config = SmallConfig();
  config.noise_sigma = 0.0;
  const SyntheticData data = GenerateSynthetic(config);
  PortfolioSpec spec = SpecFor(data, PlantedNames(data));
  spec.model.lambda_ratio = 0.0;
  BacktestOptions options;
  options.horizon = 10;
  const BacktestResult r = RunBacktest(spec, data.dataset, SmallPartition(), options);
  ASSERT_EQ(r.outlook.target_days.size(), 10u);
  EXPECT_EQ(r.outlook.target_days.front(), kSmallLast + 2);
  for (const auto& [id, predicted] : r.outlook.stock_predicted) {
    const StockRecord& stock = data.dataset.stock(*data.dataset.FindStock(id));
    for (std::size_t k = 0; k < predicted.size(); ++k) {
      EXPECT_NEAR(predicted[k], stock.ReturnOn(r.outlook.target_days[k]), 1e-6);
    }
  }
  for (std::size_t k = 0; k < r.outlook.strategy.size(); ++k) {
    EXPECT_NEAR(r.outlook.cumulative[k],
                oracle::Compound(std::span(r.outlook.strategy).first(k + 1)), 1e-12);
  }
}

TEST(OutlookTest, HorizonIsCappedAndZeroIsEmpty) {
  const SyntheticData data = GenerateSynthetic(SmallConfig());
  const CyclePartition partition = SmallPartition();
  std::vector<std::string> ids{data.dataset.stock(0).id};
  const auto series = RollingFit(data.dataset, ids, partition, {});
  EXPECT_TRUE(Outlook(data.dataset, series, partition, {}, 0).target_days.empty());
  const OutlookCurve capped = Outlook(data.dataset, series, partition, {}, 500);
  EXPECT_EQ(static_cast<int>(capped.target_days.size()),
            data.dataset.day_count() - 1 - kSmallLast);
  EXPECT_EQ(capped.target_days.back(), data.dataset.day_count());

  // A period ending on the last usable day leaves nothing to predict.
  const CyclePartition tail = PartitionCycles(40, kSmallD, 60, 89);
  const auto tail_series = RollingFit(data.dataset, ids, tail, {});
  EXPECT_ERROR_CODE(Outlook(data.dataset, tail_series, tail, {}, 5),
                    ErrorCode::kHorizonExceedsData);
  PortfolioSpec spec = SpecFor(data);
  spec.stock_ids = ids;
  const BacktestResult r = EvaluateBacktest(spec, data.dataset, tail, tail_series, 5);
  EXPECT_TRUE(r.outlook.target_days.empty());
}

TEST(OutlookTest, ZeroWeightModelCompoundsBias) {
  const SyntheticData data = GenerateSynthetic(SmallConfig());
  const CyclePartition partition = SmallPartition();
  std::vector<std::string> ids{data.dataset.stock(0).id};
  RollingOptions options;
  options.model.lambda_ratio = 2.0;
  const auto series = RollingFit(data.dataset, ids, partition, options);
  const double bias = series.begin()->second.cycles.back().model.fit.bias;
  const OutlookCurve curve = Outlook(data.dataset, series, partition,
                                     StrategyRule::AlwaysHold(), 5);
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_EQ(curve.predicted[k], bias);
    EXPECT_NEAR(curve.cumulative[k], std::pow(1.0 + bias, k + 1.0) - 1.0, 1e-12);
  }
}

TEST(BacktestTest, ValidatesSpecs) {
  const SyntheticData data = GenerateSynthetic(SmallConfig());
  PortfolioSpec spec = SpecFor(data);
  spec.stock_ids.clear();
  EXPECT_ERROR_CODE(ValidatePortfolioSpec(spec, data.dataset), ErrorCode::kInvalidSpec);
  spec = SpecFor(data);
  spec.stock_ids.push_back("000001.SZ");
  try {
    ValidatePortfolioSpec(spec, data.dataset);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidSpec);
    EXPECT_NE(std::string(e.what()).find("000001.SZ"), std::string::npos);
  }
  spec = SpecFor(data, {"nosuch"});
  EXPECT_ERROR_CODE(ValidatePortfolioSpec(spec, data.dataset), ErrorCode::kInvalidSpec);
  spec = SpecFor(data);
  spec.factor_ids.clear();
  EXPECT_ERROR_CODE(ValidatePortfolioSpec(spec, data.dataset), ErrorCode::kInvalidSpec);
  spec = SpecFor(data);
  spec.benchmark.sector = "Nowhere";
  EXPECT_ERROR_CODE(ValidatePortfolioSpec(spec, data.dataset), ErrorCode::kInvalidSpec);
}

}  // namespace
}  // namespace factorscope
