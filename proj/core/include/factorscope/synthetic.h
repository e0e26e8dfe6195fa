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

#ifndef FACTORSCOPE_SYNTHETIC_H_
#define FACTORSCOPE_SYNTHETIC_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "factorscope/date.h"
#include "factorscope/market_data.h"

namespace factorscope {

struct SyntheticConfig {
  int n_stocks = 10;
  int n_sectors = 2;
  int n_days = 500;
  int factor_count = 20;
  int sparsity = 3;
  double noise_sigma = 0.01;
  std::uint64_t seed = 42;
  // Relative weight drift per cycle: w(t) = w0 * (1 + drift * (t-1) / D).
  double drift = 0.0;
  double weight_magnitude = 0.5;
  // Converts the planted signal (unit-variance factors, ±0.5 weights) into
  // daily fractional returns: y = return_scale * (w·x + noise).
  double return_scale = 0.01;
  // Forces the planted support (0-based factor columns); empty = sampled.
  std::vector<int> support;
  bool random_signs = true;
  // Used only to validate n_days > T + D.
  int training_days = 200;
  int cycle_days = 21;
  Date start_date = Date{std::chrono::year{2015}, std::chrono::January,
                         std::chrono::day{5}};
};

struct PlantedModel {
  std::vector<std::string> factor_names;
  std::vector<int> support;
  // Base weight vectors (length F) keyed by stock id.
  std::map<std::string, std::vector<double>> weights;
  double drift = 0.0;
  double return_scale = 1.0;
  int cycle_days = 21;

  // Planted weight of factor `column` on predictor day `day`, in signal
  // units (multiply by return_scale for return units).
  double WeightAt(const std::string& stock, int column, int day) const;
};

struct SyntheticData {
  MarketDataset dataset;
  PlantedModel planted;
};

// Deterministic for a fixed config. Throws kInvalidConfig.
SyntheticData GenerateSynthetic(const SyntheticConfig& config);

}  // namespace factorscope

#endif  // FACTORSCOPE_SYNTHETIC_H_
