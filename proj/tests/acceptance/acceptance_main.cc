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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "factorscope/analysis.h"
#include "factorscope/artifacts.h"
#include "factorscope/backtest.h"
#include "factorscope/elastic_net.h"
#include "factorscope/factor_metrics.h"
#include "factorscope/rolling.h"
#include "factorscope/synthetic.h"
#include "oracles.h"

namespace factorscope {
namespace {

constexpr int kT = 200;
constexpr int kD = 21;
constexpr int kCycles = 12;
constexpr int kFirst = kT + 1;
constexpr int kLast = kT + kCycles * kD;

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Format(const char* fmt, double a = 0, double b = 0, double c = 0,
                   double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, a, b, c, d);
  return buf;
}

// The shared planted dataset: 10 stocks, 20 factors, 3 planted, sigma 0.01.
SyntheticConfig PlantedConfig(double noise) {
  SyntheticConfig config;
  config.n_stocks = 10;
  config.n_sectors = 2;
  config.n_days = 500;
  config.factor_count = 20;
  config.sparsity = 3;
  config.noise_sigma = noise;
  config.seed = 42;
  config.training_days = kT;
  config.cycle_days = kD;
  return config;
}

std::vector<std::string> Ids(const MarketDataset& ds) {
  std::vector<std::string> ids;
  for (const StockRecord& s : ds.stocks()) ids.push_back(s.id);
  return ids;
}

std::vector<std::string> PlantedNames(const SyntheticData& data) {
  std::vector<std::string> names;
  for (int c : data.planted.support) names.push_back(data.dataset.factors().names[c]);
  return names;
}

Outcome SolverCorrectness() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> normal;
  const double ratios[] = {0.0, 0.1, 0.5};
  const double alphas[] = {0.5, 1.0};
  double worst_gap = 0.0;
  double worst_kkt = 0.0;
  int passed = 0;
  constexpr int kInstances = 20;
  for (int i = 0; i < kInstances; ++i) {
    const int f = 2 + i % 5;
    const int t = 20 + (i * 7) % 41;
    Eigen::MatrixXd x(t, f);
    for (int r = 0; r < t; ++r) {
      for (int c = 0; c < f; ++c) x(r, c) = normal(rng);
    }
    Eigen::VectorXd w(f);
    for (int c = 0; c < f; ++c) w(c) = c % 2 == 0 ? normal(rng) : 0.0;
    Eigen::VectorXd y = x * w;
    for (int r = 0; r < t; ++r) y(r) += 0.5 + 0.3 * normal(rng);
    const double alpha = alphas[i % 2];
    const double lambda = ratios[(i / 2) % 3] * LambdaMax(x, y, alpha);

    const FitResult fit = FitElasticNet(x, y, {alpha, lambda, {}});
    const double solver_j = oracle::Objective(x, y, fit.weights, fit.bias, lambda, alpha);
    const double oracle_j = oracle::EnumeratedElasticNet(x, y, lambda, alpha).objective;
    const double gap = std::abs(solver_j - oracle_j);
    const double kkt = oracle::KktViolation(x, y, fit.weights, fit.bias, lambda, alpha);
    worst_gap = std::max(worst_gap, gap);
    worst_kkt = std::max(worst_kkt, kkt);
    if (gap <= 1e-6 && kkt <= 1e-6) ++passed;
  }
  const double elapsed = Seconds(start);
  return {passed == kInstances && elapsed < 5.0,
          Format("%.0f/20 instances, max |objective gap| %.2e, max KKT %.2e, %.2f s",
                 passed, worst_gap, worst_kkt, elapsed)};
}

Outcome BoundaryLaws() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  double worst_weight = 0.0;
  double worst_bias = 0.0;
  double worst_ols = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int f = 2 + i % 6;
    const int t = 30 + 5 * i;
    Eigen::MatrixXd x(t, f);
    for (int r = 0; r < t; ++r) {
      for (int c = 0; c < f; ++c) x(r, c) = normal(rng) + (c > 0 ? 0.5 * x(r, 0) : 0.0);
    }
    Eigen::VectorXd w(f);
    for (int c = 0; c < f; ++c) w(c) = normal(rng);
    const double b = normal(rng);
    const Eigen::VectorXd clean = (x * w).array() + b;
    Eigen::VectorXd noisy = clean;
    for (int r = 0; r < t; ++r) noisy(r) += normal(rng);

    for (double alpha : {0.5, 1.0}) {
      const double lambda_max = LambdaMax(x, noisy, alpha);
      for (double scale : {1.0, 1.5, 10.0}) {
        const FitResult fit = FitElasticNet(x, noisy, {alpha, scale * lambda_max, {}});
        worst_weight = std::max(worst_weight, fit.weights.cwiseAbs().maxCoeff());
        worst_bias = std::max(worst_bias, std::abs(fit.bias - noisy.mean()));
      }
    }
    const FitResult fit = FitElasticNet(x, clean, {1.0, 0.0, {}});
    const oracle::LinearFit ols = oracle::OrdinaryLeastSquares(x, clean);
    worst_ols = std::max({worst_ols, (fit.weights - ols.weights).cwiseAbs().maxCoeff(),
                          std::abs(fit.bias - ols.bias)});
  }
  return {worst_weight == 0.0 && worst_bias <= 1e-12 && worst_ols <= 1e-8,
          Format("lambda >= lambda_max: max |w| %.1e, max |b - mean| %.2e; "
                 "lambda = 0: max OLS deviation %.2e",
                 worst_weight, worst_bias, worst_ols)};
}

struct PlantedRun {
  SyntheticData data;
  CyclePartition partition;
  std::map<std::string, StockModelSeries> series;
  double fit_seconds = 0.0;
};

PlantedRun FitPlanted() {
  PlantedRun run{GenerateSynthetic(PlantedConfig(0.01)),
                 PartitionCycles(kT, kD, kFirst, kLast), {}, 0.0};
  const auto start = Clock::now();
  run.series = RollingFit(run.data.dataset, Ids(run.data.dataset), run.partition, {});
  run.fit_seconds = Seconds(start);
  return run;
}

Outcome SupportRecovery(const PlantedRun& run) {
  int good = 0;
  int total = 0;
  for (const auto& [id, series] : run.series) {
    for (const CycleModel& cm : series.cycles) {
      ++total;
      const int day = run.partition.ToAbsolute(run.partition.cycle(cm.cycle).trade_first);
      bool ok = true;
      for (int c : run.data.planted.support) {
        const double fitted = cm.model.fit.weights(c);
        const double planted = run.data.planted.WeightAt(id, c, day);
        if (fitted == 0.0 || (fitted > 0.0) != (planted > 0.0)) ok = false;
      }
      if (ok) ++good;
    }
  }
  const double share = static_cast<double>(good) / total;
  return {share >= 0.9 && run.fit_seconds < 10.0,
          Format("%.0f/%.0f stock x cycle fits recover the planted support with "
                 "correct signs (%.1f%%), %.2f s",
                 good, total, 100.0 * share, run.fit_seconds)};
}

Outcome MetricOracles(const PlantedRun& run) {
  // Decomposition identity on every fit.
  double worst_identity = 0.0;
  for (const auto& [id, series] : run.series) {
    for (const CycleModel& cm : series.cycles) {
      double lhs = cm.model.fit.bias * static_cast<double>(cm.predicted.size());
      for (int factor : series.columns) {
        lhs += FactorContribution(series, cm.cycle, factor).contribution;
      }
      double rhs = 0.0;
      for (double p : cm.predicted) rhs += p;
      worst_identity = std::max(worst_identity, std::abs(lhs - rhs));
    }
  }

  // Flip counts against brute force.
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> length(0, 30);
  std::uniform_int_distribution<int> pick(0, 5);
  std::normal_distribution<double> normal;
  int flip_matches = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> s(length(rng));
    for (double& v : s) {
      switch (pick(rng)) {
        case 0: v = 0.0; break;
        case 1: v = 1e-13 * normal(rng); break;
        default: v = normal(rng);
      }
    }
    if (CountSignFlips(s) == oracle::BruteForceSignFlips(s, kSignEpsilon)) ++flip_matches;
  }

  // Sensitivity: zero-weight factors and the strongest planted factor.
  const ModelSpec spec{};
  SensitivityOptions full;
  full.skip_inactive = false;
  double worst_zero = 0.0;
  int zero_count = 0;
  int strongest_wins = 0;
  int fits = 0;
  const std::set<int> planted(run.data.planted.support.begin(),
                              run.data.planted.support.end());
  for (const auto& [id, series] : run.series) {
    for (const CycleModel& cm : series.cycles) {
      ++fits;
      int strongest = -1;
      for (int c : run.data.planted.support) {
        if (strongest < 0 ||
            std::abs(cm.model.fit.weights(c)) > std::abs(cm.model.fit.weights(strongest))) {
          strongest = c;
        }
      }
      double max_noise = 0.0;
      for (int factor : series.columns) {
        if (planted.count(factor)) continue;
        const SensitivityScore s = FactorSensitivity(run.data.dataset, series, run.partition,
                                                     spec, cm.cycle, factor, full);
        max_noise = std::max(max_noise, s.sensitivity);
        if (cm.model.fit.weights(factor) == 0.0) {
          ++zero_count;
          worst_zero = std::max(worst_zero, s.sensitivity);
        }
      }
      const SensitivityScore top = FactorSensitivity(run.data.dataset, series,
                                                     run.partition, spec, cm.cycle, strongest);
      if (top.sensitivity > max_noise) ++strongest_wins;
    }
  }
  const double share = static_cast<double>(strongest_wins) / fits;
  const bool pass = worst_identity <= 1e-9 && flip_matches == 1000 && worst_zero <= 1e-9 &&
                    share >= 0.9;
  return {pass,
          Format("identity max error %.2e; flips %.0f/1000; zero-weight sensitivity max "
                 "%.2e; strongest planted factor wins %.1f%%",
                 worst_identity, flip_matches, worst_zero, 100.0 * share) +
              " (" + std::to_string(zero_count) + " zero-weight refits)"};
}

PortfolioSpec PlantedPortfolio(const SyntheticData& data) {
  PortfolioSpec spec;
  spec.name = "planted";
  spec.stock_ids = Ids(data.dataset);
  spec.factor_ids = PlantedNames(data);
  return spec;
}

Outcome BacktestEfficacy(const PlantedRun& run) {
  const BacktestResult r =
      RunBacktest(PlantedPortfolio(run.data), run.data.dataset, run.partition);

  const SyntheticData clean = GenerateSynthetic(PlantedConfig(0.0));
  PortfolioSpec exact = PlantedPortfolio(clean);
  exact.model.lambda_ratio = 0.0;
  BacktestOptions options;
  options.horizon = kD;
  const BacktestResult o = RunBacktest(exact, clean.dataset, run.partition, options);
  double worst = 0.0;
  std::size_t points = 0;
  for (const auto& [id, predicted] : o.outlook.stock_predicted) {
    const StockRecord& stock = clean.dataset.stock(*clean.dataset.FindStock(id));
    for (std::size_t k = 0; k < predicted.size(); ++k) {
      worst = std::max(worst, std::abs(predicted[k] - stock.ReturnOn(o.outlook.target_days[k])));
      ++points;
    }
  }
  const bool pass = r.summary.period_return > r.summary.benchmark_return &&
                    points == static_cast<std::size_t>(kD) * clean.dataset.stocks().size() &&
                    worst <= 1e-6;
  return {pass, Format("portfolio %.4f vs benchmark %.4f; noiseless outlook max error "
                       "%.2e over %.0f predictions",
                       r.summary.period_return, r.summary.benchmark_return, worst,
                       static_cast<double>(points))};
}

Outcome RollingAudit() {
  const CyclePartition p = PartitionCycles(200, 21, 201, 263);
  bool windows = p.cycle_count() == 3;
  for (const CycleWindow& w : p.cycles()) {
    const int i = w.index;
    windows = windows && w.train_first == (i - 1) * 21 + 1 && w.train_last == (i - 1) * 21 + 200 &&
              w.target_first == w.train_first + 1 && w.target_last == w.train_last + 1 &&
              w.trade_first == 200 + (i - 1) * 21 + 1 && w.trade_last == 200 + i * 21;
  }
  const CycleWindow& c2 = p.cycle(2);
  windows = windows && c2.train_first == 22 && c2.train_last == 221 && c2.target_first == 23 &&
            c2.target_last == 222 && c2.trade_first == 222 && c2.trade_last == 242;

  SyntheticConfig config = PlantedConfig(0.01);
  config.n_stocks = 3;
  config.n_days = 280;
  const SyntheticData data = GenerateSynthetic(config);
  const MarketDataset& ds = data.dataset;
  const auto series = RollingFit(ds, Ids(ds), p, {});
  oracle::CausalPanel panel(ds);
  std::vector<int> columns(ds.factor_count());
  for (int j = 0; j < ds.factor_count(); ++j) columns[j] = j;
  bool same = true;
  for (const auto& [id, s] : series) {
    const std::size_t stock = *ds.FindStock(id);
    for (const CycleWindow& w : p.cycles()) {
      const int trade_first = p.ToAbsolute(w.trade_first);
      panel.set_now(trade_first);
      const TrainedModel model = TrainWindow(panel, stock, p.ToAbsolute(w.train_first),
                                             p.ToAbsolute(w.train_last), columns, ModelSpec{});
      const CycleModel& cm = s.cycle(w.index);
      same = same && model.fit.weights == cm.model.fit.weights &&
             model.fit.bias == cm.model.fit.bias;
      for (int k = 0; k < 21; ++k) {
        panel.set_now(trade_first + k);
        same = same && PredictNextDay(panel, stock, model, columns, trade_first + k) ==
                           cm.predicted[k];
      }
    }
  }
  return {windows && same && panel.reads() > 0 && panel.violations() == 0,
          std::string("windows ") + (windows ? "exact" : "WRONG") +
              "; causal replay " + (same ? "matches" : "DIFFERS") + "; " +
              std::to_string(panel.reads()) + " audited reads, " +
              std::to_string(panel.violations()) + " future accesses"};
}

Outcome PerformanceBudget() {
  SyntheticConfig config;
  config.n_stocks = 30;
  config.n_sectors = 3;
  config.n_days = kLast + 1;
  config.factor_count = 56;
  config.sparsity = 5;
  config.noise_sigma = 0.5;
  config.seed = 3;
  config.training_days = kT;
  config.cycle_days = kD;
  const SyntheticData data = GenerateSynthetic(config);
  AnalysisSpec spec;
  spec.stock_ids = Ids(data.dataset);
  spec.period_first = kFirst;
  spec.period_last = kLast;
  spec.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto start = Clock::now();
  const AnalysisResult r = RunAnalysis(data.dataset, spec);
  const double elapsed = Seconds(start);
  const bool complete = r.importances.size() == 30u * 56u * kCycles;
  return {complete && elapsed < 20.0,
          Format("30 stocks x 56 factors x %.0f cycles in %.2f s on %.0f thread(s)", kCycles,
                 elapsed, spec.jobs)};
}

Outcome Determinism(const PlantedRun& run) {
  auto analysis = [&](int jobs) {
    AnalysisSpec spec;
    spec.stock_ids = Ids(run.data.dataset);
    spec.period_first = kFirst;
    spec.period_last = kLast;
    spec.jobs = jobs;
    const AnalysisResult r = RunAnalysis(run.data.dataset, spec);
    return DumpJson(ModelsJson(r, run.data.dataset)) +
           DumpJson(MetricsJson(r, run.data.dataset));
  };
  auto backtest = [&](int jobs) {
    BacktestOptions options;
    options.jobs = jobs;
    const BacktestResult r =
        RunBacktest(PlantedPortfolio(run.data), run.data.dataset, run.partition, options);
    return DumpJson(BacktestJson(r, run.data.dataset)) + CurvesCsv(r, run.data.dataset);
  };
  const std::string a = analysis(1);
  const std::string b = backtest(1);
  int identical = 0;
  int compared = 0;
  for (int jobs : {1, 2, 8}) {
    compared += 2;
    if (analysis(jobs) == a) ++identical;
    if (backtest(jobs) == b) ++identical;
  }
  return {identical == compared,
          std::to_string(identical) + "/" + std::to_string(compared) +
              " reruns byte-identical across jobs 1/2/8 (" + std::to_string(a.size()) +
              " + " + std::to_string(b.size()) + " bytes)"};
}

}  // namespace
}  // namespace factorscope

int main() {
  using namespace factorscope;
  int failures = 0;
  auto report = [&](const char* id, const std::function<Outcome()>& criterion) {
    Outcome outcome;
    try {
      outcome = criterion();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("%s %s  %s\n", id, outcome.pass ? "PASS" : "FAIL", outcome.detail.c_str());
    std::fflush(stdout);
  };

  report("A1", SolverCorrectness);
  report("A2", BoundaryLaws);
  const PlantedRun run = FitPlanted();
  report("A3", [&] { return SupportRecovery(run); });
  report("A4", [&] { return MetricOracles(run); });
  report("A5", [&] { return BacktestEfficacy(run); });
  report("A6", RollingAudit);
  report("A7", PerformanceBudget);
  report("A8", [&] { return Determinism(run); });
  return failures == 0 ? 0 : 1;
}
