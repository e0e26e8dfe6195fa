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

#ifndef FACTORSCOPE_NORMALIZE_H_
#define FACTORSCOPE_NORMALIZE_H_

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace factorscope {

// Windows whose population standard deviation falls below this are
// treated as constant and normalize to all zeros.
inline constexpr double kDegenerateStdDev = 1e-12;

struct NormalizedColumn {
  std::vector<double> values;
  double mean = 0.0;
  double stddev = 0.0;  // population
  bool degenerate = false;
};

// Z-scores one factor column over a training window (length >= 2).
NormalizedColumn NormalizeWindow(std::span<const double> values);

// Per-column z-score statistics fitted on a training window and reused for
// that cycle's prediction rows, so no statistic sees data past the window.
class ColumnScaler {
 public:
  ColumnScaler() = default;

  // `window` is T × F raw values, T >= 2.
  static ColumnScaler Fit(const Eigen::MatrixXd& window);

  int size() const { return static_cast<int>(mean_.size()); }
  bool degenerate(int column) const { return degenerate_[column]; }
  double mean(int column) const { return mean_[column]; }
  double stddev(int column) const { return stddev_[column]; }

  double Apply(int column, double raw) const;
  void ApplyInPlace(Eigen::MatrixXd& rows) const;
  void ApplyInPlace(std::span<double> row) const;

 private:
  std::vector<double> mean_;
  std::vector<double> stddev_;
  std::vector<bool> degenerate_;
};

}  // namespace factorscope

#endif  // FACTORSCOPE_NORMALIZE_H_
