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

#include "factorscope/artifacts.h"

#include <algorithm>

namespace factorscope {
namespace {

std::string DateOf(const MarketDataset& dataset, int day) {
  return FormatIsoDate(dataset.calendar().date(day));
}

Json CurveJson(const ReturnCurve& curve) {
  return Json{{"daily", curve.daily}, {"cumulative", curve.cumulative}};
}

Json ModelSpecJson(const ModelSpec& model) {
  return Json{{"variant", ModelVariantName(model.variant)},
              {"alpha", model.alpha()},
              {"lambda_ratio", model.lambda_ratio},
              {"cv_folds", model.cv_folds}};
}

Json TopJson(const TopFactors& top, const MarketDataset& dataset) {
  Json factors = Json::array();
  for (const RankedFactor& f : top.factors) {
    factors.push_back({{"factor", dataset.factors().names[f.factor]},
                       {"magnitude", f.magnitude}});
  }
  return Json{{"factors", std::move(factors)}, {"remainder", top.remainder}};
}

constexpr int kTopFactorCount = 5;

}  // namespace

std::string DumpJson(const Json& value) {
  return value.dump(2, ' ', false, Json::error_handler_t::replace) + "\n";
}

Json PartitionJson(const CyclePartition& partition,
                   const TradingCalendar& calendar) {
  auto date = [&](int day) { return FormatIsoDate(calendar.date(day)); };
  Json cycles = Json::array();
  for (const CycleWindow& w : partition.cycles()) {
    const int trade_first = partition.ToAbsolute(w.trade_first);
    const int trade_last = partition.ToAbsolute(w.trade_last);
    cycles.push_back({
        {"index", w.index},
        {"train_first_day", partition.ToAbsolute(w.train_first)},
        {"train_last_day", partition.ToAbsolute(w.train_last)},
        {"target_first_day", partition.ToAbsolute(w.target_first)},
        {"target_last_day", partition.ToAbsolute(w.target_last)},
        {"trade_first_day", trade_first},
        {"trade_last_day", trade_last},
        {"start_date", date(trade_first)},
        {"end_date", date(trade_last)},
    });
  }
  return Json{
      {"training_days", partition.training_days()},
      {"cycle_days", partition.cycle_days()},
      {"cycle_count", partition.cycle_count()},
      {"analysis_days", partition.analysis_days()},
      {"origin_day", partition.origin()},
      {"first_day", partition.period_first()},
      {"last_day", partition.period_last()},
      {"start_date", date(partition.period_first())},
      {"end_date", date(partition.period_last())},
      {"cycles", std::move(cycles)},
  };
}

Json ModelsJson(const AnalysisResult& result, const MarketDataset& dataset) {
  const auto& names = dataset.factors().names;
  Json stocks = Json::array();
  std::vector<std::string> fitted;
  for (const auto& [id, series] : result.series) {
    if (fitted.empty()) {
      for (int c : series.columns) fitted.push_back(names[c]);
    }
    Json cycles = Json::array();
    for (const CycleModel& cm : series.cycles) {
      const FitResult& fit = cm.model.fit;
      Json weights = Json::array();
      for (std::size_t j = 0; j < series.columns.size(); ++j) {
        if (fit.weights[j] != 0.0) {
          weights.push_back({{"factor", names[series.columns[j]]},
                             {"weight", fit.weights[j]}});
        }
      }
      double growth = 1.0;
      for (double r : cm.actual) growth *= 1.0 + r;
      Json entry{
          {"cycle", cm.cycle},
          {"weights", std::move(weights)},
          {"bias", fit.bias},
          {"lambda_used", fit.lambda_used},
          {"alpha", fit.alpha},
          {"xi", cm.xi},
          {"error_rate", cm.error_rate},
          {"price_change", growth - 1.0},
          {"sweeps", fit.sweeps},
          {"converged", fit.converged},
      };
      if (fit.cv) {
        entry["cv"] = {{"lambdas", fit.cv->lambdas},
                       {"errors", fit.cv->errors},
                       {"selected", fit.cv->selected}};
      }
      cycles.push_back(std::move(entry));
    }
    stocks.push_back({{"stock_id", id},
                      {"sector", dataset.stock(series.stock_index).sector},
                      {"cycles", std::move(cycles)}});
  }
  return Json{{"model", ModelSpecJson(result.spec.model)},
              {"factors", fitted},
              {"partition", PartitionJson(result.partition, dataset.calendar())},
              {"stocks", std::move(stocks)}};
}

Json MetricsJson(const AnalysisResult& result, const MarketDataset& dataset) {
  const auto& names = dataset.factors().names;
  const auto& types = dataset.factors().types;
  Json importance = Json::array();
  for (const FactorImportance& imp : result.importances) {
    importance.push_back({{"stock_id", imp.stock_id},
                          {"cycle", imp.cycle},
                          {"factor", names[imp.factor]},
                          {"type", FactorTypeName(types[imp.factor])},
                          {"weight", imp.weight},
                          {"mean_value", imp.mean_value},
                          {"contribution", imp.contribution}});
  }
  Json stability = Json::array();
  for (const StabilityScore& s : result.stabilities) {
    stability.push_back(
        {{"stock_id", s.stock_id}, {"factor", names[s.factor]}, {"flips", s.flips}});
  }
  Json top = Json::array();
  for (const auto& [id, series] : result.series) {
    for (const CycleModel& cm : series.cycles) {
      std::vector<FactorImportance> cycle_imps;
      for (int factor : series.columns) {
        cycle_imps.push_back(FactorContribution(series, cm.cycle, factor));
      }
      top.push_back(
          {{"stock_id", id},
           {"cycle", cm.cycle},
           {"bias", cm.model.fit.bias},
           {"positive",
            TopJson(TopKFactors(cycle_imps, kTopFactorCount, Polarity::kPositive),
                    dataset)},
           {"negative",
            TopJson(TopKFactors(cycle_imps, kTopFactorCount, Polarity::kNegative),
                    dataset)}});
    }
  }
  Json out{{"importance", std::move(importance)},
           {"stability", std::move(stability)},
           {"top_factors", std::move(top)},
           {"aggregates", AggregatesJson(result, dataset)}};
  if (result.spec.with_sensitivity) {
    Json sensitivity = Json::array();
    for (const SensitivityScore& s : result.sensitivities) {
      sensitivity.push_back({{"stock_id", s.stock_id},
                             {"cycle", s.cycle},
                             {"factor", names[s.factor]},
                             {"xi", s.xi},
                             {"xi_without", s.xi_without},
                             {"sensitivity", s.sensitivity}});
    }
    out["sensitivity"] = std::move(sensitivity);
  }
  return out;
}

Json AggregatesJson(const AnalysisResult& result, const MarketDataset& dataset) {
  const auto& names = dataset.factors().names;
  const auto& types = dataset.factors().types;
  Json out = Json::array();
  for (const AggregateImportance& a : result.aggregates) {
    out.push_back({{"cycle", a.cycle},
                   {"factor", names[a.factor]},
                   {"type", FactorTypeName(types[a.factor])},
                   {"metric_kind", MetricKindName(a.kind)},
                   {"positive_mass", a.positive_mass},
                   {"negative_mass", a.negative_mass}});
  }
  return out;
}

Json PortfolioSpecJson(const PortfolioSpec& spec) {
  return Json{
      {"name", spec.name},
      {"stocks", spec.stock_ids},
      {"factors", spec.factor_ids},
      {"model", ModelSpecJson(spec.model)},
      {"strategy",
       {{"kind", StrategyName(spec.strategy.kind)},
        {"threshold", spec.strategy.threshold}}},
      {"benchmark_scope",
       spec.benchmark.sector.empty() ? std::string("market") : spec.benchmark.sector},
  };
}

Json BacktestJson(const BacktestResult& result, const MarketDataset& dataset) {
  std::vector<std::string> dates;
  for (int day : result.target_days) dates.push_back(DateOf(dataset, day));
  Json stocks = Json::object();
  for (const auto& [id, curve] : result.stocks) stocks[id] = CurveJson(curve);
  std::vector<std::string> outlook_dates;
  for (int day : result.outlook.target_days) {
    outlook_dates.push_back(DateOf(dataset, day));
  }
  const BacktestSummary& s = result.summary;
  return Json{
      {"spec", PortfolioSpecJson(result.spec)},
      {"dates", dates},
      {"portfolio", CurveJson(result.portfolio)},
      {"benchmark", CurveJson(result.benchmark)},
      {"stocks", std::move(stocks)},
      {"outlook",
       {{"dates", outlook_dates},
        {"predicted", result.outlook.predicted},
        {"strategy", result.outlook.strategy},
        {"cumulative", result.outlook.cumulative}}},
      {"summary",
       {{"period_return", s.period_return},
        {"benchmark_return", s.benchmark_return},
        {"excess_return", s.excess_return},
        {"max_drawdown", s.max_drawdown}}},
  };
}

std::string CurvesCsv(const BacktestResult& result,
                      const MarketDataset& dataset) {
  std::string out = "date,portfolio,benchmark,outlook\n";
  for (std::size_t t = 0; t < result.target_days.size(); ++t) {
    out += DateOf(dataset, result.target_days[t]);
    out += ',';
    out += FormatDouble(result.portfolio.cumulative[t]);
    out += ',';
    out += FormatDouble(result.benchmark.cumulative[t]);
    out += ",\n";
  }
  for (std::size_t t = 0; t < result.outlook.target_days.size(); ++t) {
    out += DateOf(dataset, result.outlook.target_days[t]);
    out += ",,,";
    out += FormatDouble(result.outlook.cumulative[t]);
    out += '\n';
  }
  return out;
}

Json PlantedWeightsJson(const PlantedModel& planted, std::uint64_t seed) {
  std::vector<std::string> support;
  for (int j : planted.support) support.push_back(planted.factor_names[j]);
  Json stocks = Json::object();
  for (const auto& [id, w] : planted.weights) {
    Json weights = Json::object();
    for (int j : planted.support) weights[planted.factor_names[j]] = w[j];
    stocks[id] = std::move(weights);
  }
  return Json{{"seed", seed},
              {"factors", planted.factor_names},
              {"support", support},
              {"drift", planted.drift},
              {"return_scale", planted.return_scale},
              {"cycle_days", planted.cycle_days},
              {"weights", std::move(stocks)}};
}

Json DatasetSummaryJson(const MarketDataset& dataset) {
  std::vector<std::string> stocks;
  for (const auto& s : dataset.stocks()) stocks.push_back(s.id);
  Json factors = Json::array();
  for (int j = 0; j < dataset.factor_count(); ++j) {
    factors.push_back({{"name", dataset.factors().names[j]},
                       {"type", FactorTypeName(dataset.factors().types[j])}});
  }
  const auto& cal = dataset.calendar();
  Json calendar{{"days", cal.size()}};
  if (cal.size() > 0) {
    calendar["start_date"] = FormatIsoDate(cal.date(1));
    calendar["end_date"] = FormatIsoDate(cal.date(cal.size()));
  }
  return Json{{"stocks", stocks},
              {"sectors", dataset.sectors()},
              {"calendar", std::move(calendar)},
              {"factors", std::move(factors)}};
}

}  // namespace factorscope
