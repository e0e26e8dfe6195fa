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

#ifndef FACTORSCOPE_TESTS_UNIT_FIXTURES_H_
#define FACTORSCOPE_TESTS_UNIT_FIXTURES_H_

#include "factorscope/rolling.h"
#include "factorscope/synthetic.h"

namespace factorscope::testing {

// Four stocks, eight factors, T = 40, D = 10, three cycles starting on day 41
// and leaving 19 days after the period for outlooks.
inline constexpr int kSmallT = 40;
inline constexpr int kSmallD = 10;
inline constexpr int kSmallFirst = 41;
inline constexpr int kSmallLast = 70;

inline SyntheticConfig SmallConfig() {
  SyntheticConfig config;
  config.n_stocks = 4;
  config.n_sectors = 2;
  config.n_days = 90;
  config.factor_count = 8;
  config.sparsity = 2;
  config.noise_sigma = 0.05;
  config.training_days = kSmallT;
  config.cycle_days = kSmallD;
  config.seed = 7;
  return config;
}

inline CyclePartition SmallPartition() {
  return PartitionCycles(kSmallT, kSmallD, kSmallFirst, kSmallLast);
}

}  // namespace factorscope::testing

#endif  // FACTORSCOPE_TESTS_UNIT_FIXTURES_H_
