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

#include "factorscope/elastic_net.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "factorscope/error.h"

namespace factorscope {
namespace {

// Absolute slack of the stationarity test applied at termination.
constexpr double kKktTolerance = 1e-6;

double SoftThreshold(double a, double kappa) {
  if (a > kappa) return a - kappa;
  if (a < -kappa) return a + kappa;
  return 0.0;
}

void CheckFinite(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (!x.allFinite() || !y.allFinite()) {
    throw Error(ErrorCode::kNonFiniteInput, "design matrix or target is not finite");
  }
}

void CheckShape(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "design has " + std::to_string(x.rows()) + " rows, target has " +
                    std::to_string(y.size()));
  }
}

// Stationarity of the objective in every weight, with ρ_j = x_j·r + w_j z_j.
bool SatisfiesKkt(const Eigen::MatrixXd& x, const Eigen::VectorXd& residual,
                  const Eigen::VectorXd& w, const Eigen::VectorXd& z,
                  double kappa, double ridge) {
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (z[j] == 0.0) continue;
    const double rho = x.col(j).dot(residual) + w[j] * z[j];
    if (w[j] != 0.0) {
      const double sign = w[j] > 0.0 ? 1.0 : -1.0;
      const double g = -rho + w[j] * z[j] + ridge * w[j] + kappa * sign;
      if (std::abs(g) > kKktTolerance * (1.0 + std::abs(rho))) return false;
    } else if (std::abs(rho) > kappa + kKktTolerance) {
      return false;
    }
  }
  return true;
}

// Coordinate descent converges linearly. Once it has found the active set
// and signs, the optimum restricted to them solves a small linear system;
// take that solution when it keeps the signs, satisfies the conditions on
// the inactive set and does not raise the objective.
void PolishActiveSet(const Eigen::MatrixXd& xc, const Eigen::VectorXd& yc,
                     const Eigen::VectorXd& z, double kappa, double ridge,
                     const ElasticNetConfig& config, Eigen::VectorXd& w) {
  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (w[j] != 0.0) active.push_back(j);
  }
  if (active.empty()) return;
  const auto k = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd xa(xc.rows(), k);
  Eigen::VectorXd sign(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    xa.col(a) = xc.col(active[a]);
    sign[a] = w[active[a]] > 0.0 ? 1.0 : -1.0;
  }
  Eigen::MatrixXd gram = xa.transpose() * xa;
  gram.diagonal().array() += ridge;
  const Eigen::VectorXd rhs = xa.transpose() * yc - kappa * sign;
  const auto qr = gram.colPivHouseholderQr();
  if (qr.rank() < k) return;
  const Eigen::VectorXd wa = qr.solve(rhs);
  if (!wa.allFinite()) return;
  // Without an L1 term the signs carry no constraint.
  for (Eigen::Index a = 0; a < k && kappa > 0.0; ++a) {
    if (wa[a] * sign[a] <= 0.0) return;
  }
  Eigen::VectorXd candidate = Eigen::VectorXd::Zero(w.size());
  for (Eigen::Index a = 0; a < k; ++a) candidate[active[a]] = wa[a];
  const Eigen::VectorXd r = yc - xa * wa;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (candidate[j] == 0.0 && z[j] != 0.0 &&
        std::abs(xc.col(j).dot(r)) > kappa + kKktTolerance) {
      return;
    }
  }
  const double before = ObjectiveValue(w, 0.0, xc, yc, config.lambda, config.alpha);
  const double after =
      ObjectiveValue(candidate, 0.0, xc, yc, config.lambda, config.alpha);
  if (after <= before) w = candidate;
}

}  // namespace

std::string_view ModelVariantName(ModelVariant variant) {
  switch (variant) {
    case ModelVariant::kLasso:
      return "lasso";
    case ModelVariant::kLassoCV:
      return "lassocv";
    case ModelVariant::kElasticNet:
      return "elnet";
  }
  return "lasso";
}

std::optional<ModelVariant> ParseModelVariant(std::string_view name) {
  if (name == "lasso") return ModelVariant::kLasso;
  if (name == "lassocv") return ModelVariant::kLassoCV;
  if (name == "elnet") return ModelVariant::kElasticNet;
  return std::nullopt;
}

double ObjectiveValue(const Eigen::VectorXd& weights, double bias,
                      const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                      double lambda, double alpha) {
  CheckShape(x, y);
  if (weights.size() != x.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "weight length differs from factor count");
  }
  const Eigen::VectorXd r =
      y - x * weights - Eigen::VectorXd::Constant(y.size(), bias);
  const double penalty =
      alpha * weights.lpNorm<1>() + (1.0 - alpha) * weights.squaredNorm();
  return 0.5 * r.squaredNorm() + 0.5 * lambda * penalty;
}

FitResult FitElasticNet(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        const ElasticNetConfig& config) {
  return FitElasticNet(x, y, config, Eigen::VectorXd::Zero(x.cols()));
}

FitResult FitElasticNet(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        const ElasticNetConfig& config,
                        const Eigen::VectorXd& initial_weights) {
  CheckShape(x, y);
  CheckFinite(x, y);
  if (x.rows() < 2) {
    throw Error(ErrorCode::kTooFewSamples, "elastic net needs at least 2 samples");
  }
  if (initial_weights.size() != x.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "initial weights have wrong length");
  }
  if (!(config.alpha >= 0.0 && config.alpha <= 1.0) ||
      !(config.lambda >= 0.0) || !std::isfinite(config.lambda)) {
    throw Error(ErrorCode::kInvalidArgument,
                "alpha must be in [0, 1] and lambda finite and >= 0");
  }
  if (config.solver.max_sweeps < 1 || !(config.solver.tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "max_sweeps >= 1 and tol > 0 required");
  }

  const Eigen::Index n = x.rows();
  const Eigen::Index f = x.cols();
  const double kappa = config.lambda * config.alpha / 2.0;
  const double ridge = config.lambda * (1.0 - config.alpha);

  // The intercept is unpenalized, so it is profiled out: fit on centered
  // data and recover b = mean(y) - mean(x)·w.
  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const double y_mean = y.mean();
  const Eigen::MatrixXd xc = x.rowwise() - x_mean;
  const Eigen::VectorXd yc = y.array() - y_mean;
  const Eigen::VectorXd z = xc.colwise().squaredNorm().transpose();

  FitResult result;
  result.alpha = config.alpha;
  result.lambda_used = config.lambda;
  Eigen::VectorXd& w = result.weights;
  w = initial_weights;
  for (Eigen::Index j = 0; j < f; ++j) {
    if (z[j] == 0.0) w[j] = 0.0;
  }

  if (config.alpha > 0.0 && f > 0 &&
      config.lambda >= LambdaMax(x, y, config.alpha)) {
    // Every correlation is inside the threshold: the zero vector is optimal.
    w.setZero();
    result.sweeps = 0;
    result.converged = true;
  } else {
    Eigen::VectorXd r = yc - xc * w;
    for (int sweep = 1; sweep <= config.solver.max_sweeps; ++sweep) {
      result.sweeps = sweep;
      double max_change = 0.0;
      for (Eigen::Index j = 0; j < f; ++j) {
        if (z[j] == 0.0) continue;
        const double rho = xc.col(j).dot(r) + w[j] * z[j];
        const double updated = SoftThreshold(rho, kappa) / (z[j] + ridge);
        const double delta = updated - w[j];
        if (delta != 0.0) {
          r.noalias() -= delta * xc.col(j);
          w[j] = updated;
          max_change = std::max(max_change, std::abs(delta));
        }
      }
      if (config.solver.record_objective) {
        result.objective_trace.push_back(
            0.5 * r.squaredNorm() +
            0.5 * config.lambda *
                (config.alpha * w.lpNorm<1>() + (1.0 - config.alpha) * w.squaredNorm()));
      }
      if (max_change < config.solver.tol) {
        // Small steps can stall above the stationarity tolerance on strongly
        // correlated columns; keep sweeping until it is met as well.
        if (max_change == 0.0 || SatisfiesKkt(xc, r, w, z, kappa, ridge)) {
          result.converged = true;
          break;
        }
      }
    }
    PolishActiveSet(xc, yc, z, kappa, ridge, config, w);
  }

  result.bias = y_mean - x_mean.dot(w);
  result.residuals = y - x * w - Eigen::VectorXd::Constant(n, result.bias);
  result.objective = ObjectiveValue(w, result.bias, x, y, config.lambda, config.alpha);
  return result;
}

double LambdaMax(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                 double alpha) {
  CheckShape(x, y);
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda_max needs alpha in (0, 1]");
  }
  if (y.size() == 0 || x.cols() == 0) return 0.0;
  const Eigen::VectorXd centered = y.array() - y.mean();
  const double max_corr = (x.transpose() * centered).cwiseAbs().maxCoeff();
  return max_corr * 2.0 / alpha;
}

FitResult FitLasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   const LassoOptions& options) {
  CheckShape(x, y);
  CheckFinite(x, y);
  if (!(options.lambda_ratio >= 0.0) || !std::isfinite(options.lambda_ratio)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda ratio must be >= 0");
  }
  ElasticNetConfig config;
  config.alpha = 1.0;
  config.lambda = options.lambda_ratio * LambdaMax(x, y, 1.0);
  config.solver = options.solver;
  return FitElasticNet(x, y, config);
}

std::vector<double> LambdaGrid(double lambda_max, int grid_size,
                               double min_ratio) {
  if (grid_size < 1 || !(min_ratio > 0.0 && min_ratio <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "lambda grid needs grid_size >= 1 and min_ratio in (0, 1]");
  }
  std::vector<double> grid(grid_size);
  if (grid_size == 1) {
    grid[0] = lambda_max;
    return grid;
  }
  const double log_min = std::log10(min_ratio);
  for (int g = 0; g < grid_size; ++g) {
    const double exponent =
        log_min * static_cast<double>(g) / static_cast<double>(grid_size - 1);
    grid[g] = lambda_max * std::pow(10.0, exponent);
  }
  return grid;
}

namespace {

struct Fold {
  Eigen::MatrixXd x_train;
  Eigen::VectorXd y_train;
  Eigen::MatrixXd x_test;
  Eigen::VectorXd y_test;
};

std::vector<Fold> ContiguousFolds(const Eigen::MatrixXd& x,
                                  const Eigen::VectorXd& y, int k) {
  const Eigen::Index n = x.rows();
  if (k < 2 || n < k) {
    throw Error(ErrorCode::kTooFewSamples,
                "cross-validation needs 2 <= folds <= samples (folds=" +
                    std::to_string(k) + ", samples=" + std::to_string(n) + ")");
  }
  std::vector<Fold> folds(k);
  for (int f = 0; f < k; ++f) {
    const Eigen::Index begin = n * f / k;
    const Eigen::Index end = n * (f + 1) / k;
    const Eigen::Index held = end - begin;
    const Eigen::Index kept = n - held;
    if (kept < 2) {
      throw Error(ErrorCode::kTooFewSamples,
                  "cross-validation training fold has fewer than 2 samples");
    }
    Fold& fold = folds[f];
    fold.x_test = x.middleRows(begin, held);
    fold.y_test = y.segment(begin, held);
    fold.x_train.resize(kept, x.cols());
    fold.y_train.resize(kept);
    fold.x_train.topRows(begin) = x.topRows(begin);
    fold.y_train.head(begin) = y.head(begin);
    fold.x_train.bottomRows(n - end) = x.bottomRows(n - end);
    fold.y_train.tail(n - end) = y.tail(n - end);
  }
  return folds;
}

double HeldOutMse(const FitResult& fit, const Fold& fold) {
  const Eigen::VectorXd err =
      fold.y_test - fold.x_test * fit.weights -
      Eigen::VectorXd::Constant(fold.y_test.size(), fit.bias);
  return err.squaredNorm() / static_cast<double>(err.size());
}

}  // namespace

double CrossValidationError(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            double lambda, const CrossValidationOptions& options) {
  CheckShape(x, y);
  CheckFinite(x, y);
  const auto folds = ContiguousFolds(x, y, options.folds);
  ElasticNetConfig config{options.alpha, lambda, options.solver};
  double total = 0.0;
  for (const Fold& fold : folds) {
    total += HeldOutMse(FitElasticNet(fold.x_train, fold.y_train, config), fold);
  }
  return total / static_cast<double>(folds.size());
}

FitResult FitLassoCV(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     const CrossValidationOptions& options) {
  CheckShape(x, y);
  CheckFinite(x, y);
  const auto folds = ContiguousFolds(x, y, options.folds);

  CrossValidationCurve curve;
  curve.lambdas = LambdaGrid(LambdaMax(x, y, options.alpha), options.grid_size,
                             options.min_ratio);
  curve.errors.assign(curve.lambdas.size(), 0.0);
  for (const Fold& fold : folds) {
    // Descending lambdas, each warm-started from the previous solution.
    Eigen::VectorXd warm = Eigen::VectorXd::Zero(x.cols());
    for (std::size_t g = 0; g < curve.lambdas.size(); ++g) {
      ElasticNetConfig config{options.alpha, curve.lambdas[g], options.solver};
      const FitResult fit = FitElasticNet(fold.x_train, fold.y_train, config, warm);
      warm = fit.weights;
      curve.errors[g] += HeldOutMse(fit, fold) / static_cast<double>(folds.size());
    }
  }
  // Strict improvement only, so ties keep the larger lambda.
  curve.selected = 0;
  for (std::size_t g = 1; g < curve.errors.size(); ++g) {
    if (curve.errors[g] < curve.errors[curve.selected]) {
      curve.selected = static_cast<int>(g);
    }
  }
  ElasticNetConfig config{options.alpha, curve.lambdas[curve.selected],
                          options.solver};
  FitResult result = FitElasticNet(x, y, config);
  result.cv = std::move(curve);
  return result;
}

double Predict(const FitResult& fit, std::span<const double> row) {
  if (static_cast<Eigen::Index>(row.size()) != fit.weights.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "row has " + std::to_string(row.size()) + " factors, model has " +
                    std::to_string(fit.weights.size()));
  }
  double value = fit.bias;
  for (std::size_t j = 0; j < row.size(); ++j) value += fit.weights[j] * row[j];
  return value;
}

FitResult FitModel(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   const ModelSpec& spec) {
  switch (spec.variant) {
    case ModelVariant::kLasso:
      return FitLasso(x, y, LassoOptions{spec.lambda_ratio, spec.solver});
    case ModelVariant::kLassoCV: {
      CrossValidationOptions options;
      options.folds = spec.cv_folds;
      options.solver = spec.solver;
      return FitLassoCV(x, y, options);
    }
    case ModelVariant::kElasticNet: {
      CheckShape(x, y);
      CheckFinite(x, y);
      ElasticNetConfig config;
      config.alpha = 0.5;
      config.lambda = spec.lambda_ratio * LambdaMax(x, y, 0.5);
      config.solver = spec.solver;
      return FitElasticNet(x, y, config);
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown model variant");
}

}  // namespace factorscope
