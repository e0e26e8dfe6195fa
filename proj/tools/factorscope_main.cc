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

// factorscope: batch driver and HTTP server.
//
//   factorscope generate --out DIR [--stocks N --factors F --seed S ...]
//   factorscope run --data DIR --out DIR [--model lasso --period A..B ...]
//   factorscope serve [--host H --port P ...]
//
// Exit codes: 0 ok, 1 runtime error, 2 usage error. Every flag may also be
// given in a TOML manifest passed with --manifest.

#include <csignal>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <pthread.h>

#include "CLI11.hpp"
#include "factorscope/analysis.h"
#include "factorscope/artifacts.h"
#include "factorscope/backtest.h"
#include "factorscope/error.h"
#include "factorscope/service.h"
#include "factorscope/synthetic.h"

namespace fs = std::filesystem;

namespace factorscope {
namespace {

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 1;

struct UsageError {
  std::string message;
};

int DefaultJobs() {
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

struct GenerateFlags {
  SyntheticConfig config;
  std::string out;
};

struct RunFlags {
  std::string data;
  std::string model = "lasso";
  std::string period;
  std::vector<std::string> factors;
  std::vector<std::string> stocks;
  std::vector<std::string> sectors;
  bool backtest = false;
  bool sensitivity = false;
  std::string out;
  int jobs = DefaultJobs();
  int training_days = kDefaultTrainingDays;
  int cycle_days = kDefaultCycleDays;
  int horizon = kDefaultHorizonDays;
  double lambda_ratio = 0.1;
  int cv_folds = 10;
  bool no_strict_factors = false;
  std::string strategy = "long_or_cash";
  double threshold = 0.0;
  std::string benchmark = "market";
  std::uint64_t seed = 0;
};

std::optional<Date> PeriodEnd(const std::string& text, const char* which) {
  if (text.empty()) return std::nullopt;
  const auto date = ParseIsoDate(text);
  if (!date) throw UsageError{std::string("--period ") + which + " is not YYYY-MM-DD"};
  return date;
}

std::pair<std::optional<Date>, std::optional<Date>> ParsePeriodFlag(
    const std::string& text) {
  if (text.empty()) return {};
  const auto sep = text.find("..");
  if (sep == std::string::npos) throw UsageError{"--period must look like A..B"};
  return {PeriodEnd(text.substr(0, sep), "start"),
          PeriodEnd(text.substr(sep + 2), "end")};
}

void WriteManifest(const fs::path& out, Json manifest) {
  WriteTextFile(out / "manifest.json", DumpJson(manifest));
}

int Generate(const GenerateFlags& flags) {
  const SyntheticConfig& c = flags.config;
  if (c.sparsity > c.factor_count) {
    throw UsageError{"--sparsity must not exceed --factors"};
  }
  if (c.n_stocks < 1 || c.n_sectors < 1 || c.n_sectors > c.n_stocks ||
      c.factor_count < 1 || c.factor_count > 56 || c.sparsity < 0 ||
      c.n_days < 3 || !(c.noise_sigma >= 0.0)) {
    throw UsageError{"invalid generator flags"};
  }
  std::optional<SyntheticData> generated;
  try {
    generated.emplace(GenerateSynthetic(c));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInvalidConfig) throw;
    throw UsageError{e.what()};
  }
  const SyntheticData& data = *generated;
  const fs::path out(flags.out);
  fs::create_directories(out);
  WriteDataset(data.dataset, out);
  WriteTextFile(out / "planted_weights.json",
                DumpJson(PlantedWeightsJson(data.planted, c.seed)));
  WriteManifest(out, Json{{"subcommand", "generate"},
                          {"out", flags.out},
                          {"seed", c.seed},
                          {"config",
                           {{"stocks", c.n_stocks},
                            {"sectors", c.n_sectors},
                            {"days", c.n_days},
                            {"factors", c.factor_count},
                            {"sparsity", c.sparsity},
                            {"noise", c.noise_sigma},
                            {"drift", c.drift}}},
                          {"artifacts",
                           {"prices.csv", "factors.csv", "sectors.csv",
                            "planted_weights.json"}}});
  std::cout << "wrote synthetic dataset to " << flags.out << "\n";
  return 0;
}

int Run(const RunFlags& flags) {
  const auto variant = ParseModelVariant(flags.model);
  if (!variant) throw UsageError{"unknown --model " + flags.model};
  const auto strategy = ParseStrategy(flags.strategy);
  if (!strategy) throw UsageError{"unknown --strategy " + flags.strategy};
  if (flags.training_days < 2 || flags.cycle_days < 1 || flags.horizon < 0 ||
      flags.jobs < 1 || !(flags.lambda_ratio >= 0.0) || flags.cv_folds < 2) {
    throw UsageError{"invalid numeric flag"};
  }
  const auto [start, end] = ParsePeriodFlag(flags.period);

  LoadOptions load;
  load.strict_factors = !flags.no_strict_factors;
  const MarketDataset dataset = LoadDatasetDir(flags.data, load);
  const ResolvedPeriod period =
      ResolvePeriod(dataset.calendar(), start, end, flags.training_days,
                    flags.cycle_days, flags.backtest ? flags.horizon : 0);
  if (period.adjusted) {
    std::cerr << "period end moved from "
              << FormatIsoDate(dataset.calendar().date(period.requested_last_day))
              << " to " << FormatIsoDate(dataset.calendar().date(period.last_day))
              << " to fit whole cycles\n";
  }

  AnalysisSpec spec;
  spec.stock_ids = ResolveStocks(dataset, flags.stocks, flags.sectors);
  spec.period_first = period.first_day;
  spec.period_last = period.last_day;
  spec.training_days = flags.training_days;
  spec.cycle_days = flags.cycle_days;
  spec.model.variant = *variant;
  spec.model.lambda_ratio = flags.lambda_ratio;
  spec.model.cv_folds = flags.cv_folds;
  spec.factors = flags.factors;
  spec.with_sensitivity = flags.sensitivity;
  spec.jobs = flags.jobs;
  const AnalysisResult result = RunAnalysis(dataset, spec);

  const fs::path out(flags.out);
  fs::create_directories(out);
  std::vector<std::string> artifacts = {"models.json", "metrics.json"};
  WriteTextFile(out / "models.json", DumpJson(ModelsJson(result, dataset)));
  WriteTextFile(out / "metrics.json", DumpJson(MetricsJson(result, dataset)));

  if (flags.backtest) {
    PortfolioSpec portfolio;
    portfolio.name = "portfolio 1";
    portfolio.stock_ids = spec.stock_ids;
    portfolio.factor_ids =
        flags.factors.empty() ? dataset.factors().names : flags.factors;
    portfolio.model = spec.model;
    portfolio.strategy.kind = *strategy;
    portfolio.strategy.threshold = flags.threshold;
    portfolio.benchmark.sector =
        flags.benchmark == "market" ? std::string() : flags.benchmark;
    ValidatePortfolioSpec(portfolio, dataset);
    const BacktestResult backtest = EvaluateBacktest(
        portfolio, dataset, result.partition, result.series, flags.horizon);
    WriteTextFile(out / "backtest.json", DumpJson(BacktestJson(backtest, dataset)));
    WriteTextFile(out / "curves.csv", CurvesCsv(backtest, dataset));
    artifacts.push_back("backtest.json");
    artifacts.push_back("curves.csv");
    std::cout << "excess return " << FormatDouble(backtest.summary.excess_return)
              << "\n";
  }

  const auto& cal = dataset.calendar();
  WriteManifest(
      out, Json{{"subcommand", "run"},
                {"inputs", {{"data", flags.data}}},
                {"out", flags.out},
                {"seed", flags.seed},
                {"config",
                 {{"model", flags.model},
                  {"lambda_ratio", flags.lambda_ratio},
                  {"cv_folds", flags.cv_folds},
                  {"training_days", flags.training_days},
                  {"cycle_days", flags.cycle_days},
                  {"horizon", flags.horizon},
                  {"factors", flags.factors},
                  {"stocks", flags.stocks},
                  {"sectors", flags.sectors},
                  {"strategy", flags.strategy},
                  {"threshold", flags.threshold},
                  {"benchmark", flags.benchmark},
                  {"sensitivity", flags.sensitivity},
                  {"backtest", flags.backtest},
                  {"strict_factors", !flags.no_strict_factors}}},
                {"period",
                 {{"start_date", FormatIsoDate(cal.date(period.first_day))},
                  {"end_date", FormatIsoDate(cal.date(period.last_day))},
                  {"adjusted", period.adjusted}}},
                {"artifacts", artifacts}});
  std::cout << "wrote " << artifacts.size() << " artifacts to " << flags.out
            << " (" << result.partition.cycle_count() << " cycles, "
            << result.series.size() << " stocks)\n";
  return 0;
}

int Serve(const ServiceConfig& config) {
  if (config.port < 0 || config.port > 65535 || config.workers < 1 ||
      config.training_days < 2 || config.cycle_days < 1 || config.horizon < 0 ||
      config.jobs < 1) {
    throw UsageError{"invalid server flags"};
  }
  // Block termination signals in every thread and take them synchronously.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Service service(config);
  HttpServer server(service);
  const int port = server.Bind(config.host, config.port);
  if (port < 0) {
    std::cerr << "cannot bind " << config.host << ":" << config.port << "\n";
    return kRuntimeError;
  }
  std::thread waiter([&] {
    int signal = 0;
    sigwait(&signals, &signal);
    server.Stop();
  });
  std::cout << "listening on http://" << config.host << ":" << port << std::endl;
  const bool ok = server.ListenAfterBind();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return ok ? 0 : kRuntimeError;
}

int Main(int argc, char** argv) {
  CLI::App app{"Sparse factor-model analysis of stock returns"};
  app.require_subcommand(1);
  app.set_config("--manifest", "", "TOML file holding flag values");

  GenerateFlags gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset");
  generate->add_option("--out", gen.out, "Output directory")->required();
  generate->add_option("--stocks", gen.config.n_stocks, "Number of stocks");
  generate->add_option("--sectors", gen.config.n_sectors, "Number of sectors");
  generate->add_option("--days", gen.config.n_days, "Trading days");
  generate->add_option("--factors", gen.config.factor_count, "Factor count");
  generate->add_option("--sparsity", gen.config.sparsity, "Planted support size");
  generate->add_option("--noise", gen.config.noise_sigma, "Noise sigma");
  generate->add_option("--seed", gen.config.seed, "RNG seed");
  generate->add_option("--training-days", gen.config.training_days,
                       "Training window the data must cover");
  generate->add_option("--cycle-days", gen.config.cycle_days,
                       "Cycle length the data must cover");
  generate->add_option("--drift", gen.config.drift, "Weight drift per cycle");
  generate->add_option("--return-scale", gen.config.return_scale,
                       "Scale of the daily return signal");

  RunFlags run;
  auto* run_cmd = app.add_subcommand("run", "Fit rolling models and write artifacts");
  run_cmd->add_option("--data", run.data, "Dataset directory")->required();
  run_cmd->add_option("--out", run.out, "Output directory")->required();
  run_cmd->add_option("--model", run.model, "lasso | lassocv | elnet");
  run_cmd->add_option("--period", run.period, "START..END as ISO dates");
  run_cmd->add_option("--factors", run.factors, "Factor subset")->delimiter(',');
  run_cmd->add_option("--stocks", run.stocks, "Stock ids")->delimiter(',');
  run_cmd->add_option("--sectors", run.sectors, "Sector names")->delimiter(',');
  run_cmd->add_flag("--backtest", run.backtest, "Also run a backtest");
  run_cmd->add_flag("--sensitivity", run.sensitivity, "Compute sensitivity");
  run_cmd->add_option("--jobs", run.jobs, "Worker threads");
  run_cmd->add_option("--training-days", run.training_days, "Training window T");
  run_cmd->add_option("--cycle-days", run.cycle_days, "Cycle length D");
  run_cmd->add_option("--horizon", run.horizon, "Outlook horizon H");
  run_cmd->add_option("--lambda-ratio", run.lambda_ratio,
                      "Penalty as a fraction of lambda_max");
  run_cmd->add_option("--cv-folds", run.cv_folds, "Folds for lassocv");
  run_cmd->add_flag("--no-strict-factors", run.no_strict_factors,
                    "Accept factors missing from the registry");
  run_cmd->add_option("--strategy", run.strategy,
                      "long_or_cash | always_hold | threshold");
  run_cmd->add_option("--threshold", run.threshold, "Threshold strategy cutoff");
  run_cmd->add_option("--benchmark", run.benchmark, "market or a sector name");
  run_cmd->add_option("--seed", run.seed, "Seed recorded in the manifest");

  ServiceConfig serve_config;
  auto* serve = app.add_subcommand("serve", "Start the HTTP API");
  serve->add_option("--host", serve_config.host, "Bind address")
      ->envname("FACTORSCOPE_HOST");
  serve->add_option("--port", serve_config.port, "Port, 0 for any")
      ->envname("FACTORSCOPE_PORT");
  serve->add_option("--workers", serve_config.workers, "Request threads")
      ->envname("FACTORSCOPE_WORKERS");
  serve->add_option("--cache-size", serve_config.cache_size, "Cached responses")
      ->envname("FACTORSCOPE_CACHE_SIZE");
  serve->add_option("--training-days", serve_config.training_days, "Default T")
      ->envname("FACTORSCOPE_TRAINING_DAYS");
  serve->add_option("--cycle-days", serve_config.cycle_days, "Default D")
      ->envname("FACTORSCOPE_CYCLE_DAYS");
  serve->add_option("--horizon", serve_config.horizon, "Default H")
      ->envname("FACTORSCOPE_HORIZON");
  serve->add_option("--lambda-ratio", serve_config.lambda_ratio,
                    "Default penalty ratio")
      ->envname("FACTORSCOPE_LAMBDA_RATIO");
  serve->add_option("--jobs", serve_config.jobs, "Threads per analysis")
      ->envname("FACTORSCOPE_JOBS");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*generate) return Generate(gen);
    if (*run_cmd) return Run(run);
    return Serve(serve_config);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.message << "\n\n" << app.help();
    return kUsageError;
  } catch (const Error& e) {
    std::cerr << "error [" << ErrorCodeName(e.code()) << "]: " << e.what() << "\n";
    return kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}

}  // namespace
}  // namespace factorscope

int main(int argc, char** argv) { return factorscope::Main(argc, argv); }
