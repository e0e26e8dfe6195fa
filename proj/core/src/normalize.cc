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

#include "factorscope/normalize.h"

#include <cmath>
#include <string>

#include "factorscope/error.h"

namespace factorscope {
namespace {

struct Moments {
  double mean;
  double stddev;
};

template <typename Getter>
Moments PopulationMoments(Eigen::Index n, Getter&& at) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) sum += at(i);
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = at(i) - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / static_cast<double>(n))};
}

}  // namespace

NormalizedColumn NormalizeWindow(std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(ErrorCode::kTooFewSamples,
                "normalization window needs at least 2 values, got " +
                    std::to_string(values.size()));
  }
  const auto m = PopulationMoments(static_cast<Eigen::Index>(values.size()),
                                   [&](Eigen::Index i) { return values[i]; });
  NormalizedColumn out;
  out.mean = m.mean;
  out.stddev = m.stddev;
  out.degenerate = !(m.stddev >= kDegenerateStdDev);
  out.values.resize(values.size(), 0.0);
  if (!out.degenerate) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      out.values[i] = (values[i] - m.mean) / m.stddev;
    }
  }
  return out;
}

ColumnScaler ColumnScaler::Fit(const Eigen::MatrixXd& window) {
  if (window.rows() < 2) {
    throw Error(ErrorCode::kTooFewSamples,
                "normalization window needs at least 2 rows");
  }
  ColumnScaler scaler;
  const Eigen::Index cols = window.cols();
  scaler.mean_.resize(cols);
  scaler.stddev_.resize(cols);
  scaler.degenerate_.resize(cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const auto m = PopulationMoments(
        window.rows(), [&](Eigen::Index i) { return window(i, j); });
    scaler.mean_[j] = m.mean;
    scaler.stddev_[j] = m.stddev;
    scaler.degenerate_[j] = !(m.stddev >= kDegenerateStdDev);
  }
  return scaler;
}

double ColumnScaler::Apply(int column, double raw) const {
  if (degenerate_[column]) return 0.0;
  return (raw - mean_[column]) / stddev_[column];
}

void ColumnScaler::ApplyInPlace(Eigen::MatrixXd& rows) const {
  for (Eigen::Index j = 0; j < rows.cols(); ++j) {
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      rows(i, j) = Apply(static_cast<int>(j), rows(i, j));
    }
  }
}

void ColumnScaler::ApplyInPlace(std::span<double> row) const {
  for (std::size_t j = 0; j < row.size(); ++j) {
    row[j] = Apply(static_cast<int>(j), row[j]);
  }
}

}  // namespace factorscope
