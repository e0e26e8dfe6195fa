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

#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <benchmark/benchmark.h>

#include "factorscope/analysis.h"
#include "factorscope/elastic_net.h"
#include "factorscope/rolling.h"
#include "factorscope/synthetic.h"

namespace factorscope {
namespace {

struct Problem {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

Problem RandomProblem(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Problem p{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) p.x(r, c) = normal(rng);
  }
  p.y = 0.5 * p.x.col(0) - 0.5 * p.x.col(1);
  for (int r = 0; r < rows; ++r) p.y(r) += 0.1 * normal(rng);
  return p;
}

void BM_FitLasso(benchmark::State& state) {
  const Problem p = RandomProblem(200, static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(FitLasso(p.x, p.y).bias);
}
BENCHMARK(BM_FitLasso)->Arg(20)->Arg(56);

void BM_FitElasticNet(benchmark::State& state) {
  const Problem p = RandomProblem(200, static_cast<int>(state.range(0)), 2);
  const double lambda = 0.1 * LambdaMax(p.x, p.y, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(FitElasticNet(p.x, p.y, {0.5, lambda, {}}).bias);
  }
}
BENCHMARK(BM_FitElasticNet)->Arg(20)->Arg(56);

void BM_FitLassoCV(benchmark::State& state) {
  const Problem p = RandomProblem(200, 20, 3);
  for (auto _ : state) benchmark::DoNotOptimize(FitLassoCV(p.x, p.y).lambda_used);
}
BENCHMARK(BM_FitLassoCV)->Unit(benchmark::kMillisecond);

void BM_RollingFit(benchmark::State& state) {
  SyntheticConfig config;
  config.n_stocks = 10;
  config.factor_count = 56;
  config.n_days = 453;
  const SyntheticData data = GenerateSynthetic(config);
  std::vector<std::string> ids;
  for (const StockRecord& s : data.dataset.stocks()) ids.push_back(s.id);
  const CyclePartition partition = PartitionCycles(200, 21, 201, 452);
  RollingOptions options;
  options.jobs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(RollingFit(data.dataset, ids, partition, options).size());
  }
}
BENCHMARK(BM_RollingFit)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace factorscope

BENCHMARK_MAIN();
