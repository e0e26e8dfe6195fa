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

#ifndef FACTORSCOPE_ELASTIC_NET_H_
#define FACTORSCOPE_ELASTIC_NET_H_

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace factorscope {

enum class ModelVariant { kLasso, kLassoCV, kElasticNet };

// "lasso", "lassocv", "elnet".
std::string_view ModelVariantName(ModelVariant variant);
std::optional<ModelVariant> ParseModelVariant(std::string_view name);

struct SolverOptions {
  int max_sweeps = 1000;
  // Stop once the largest coordinate change in a sweep is below this.
  double tol = 1e-7;
  // Keep the objective after every sweep in FitResult::objective_trace.
  bool record_objective = false;
};

struct ElasticNetConfig {
  double alpha = 1.0;
  double lambda = 0.0;
  SolverOptions solver;
};

struct CrossValidationCurve {
  std::vector<double> lambdas;  // descending, lambdas[0] = lambda_max
  std::vector<double> errors;   // mean held-out MSE per lambda
  int selected = 0;
};

struct FitResult {
  Eigen::VectorXd weights;
  double bias = 0.0;
  Eigen::VectorXd residuals;
  double lambda_used = 0.0;
  double alpha = 1.0;
  double objective = 0.0;
  int sweeps = 0;
  bool converged = false;
  std::vector<double> objective_trace;
  std::optional<CrossValidationCurve> cv;
};

// J = ½·Σ r² + ½λ[α·‖w‖₁ + (1−α)·‖w‖₂²], r = y − Xw − b.
double ObjectiveValue(const Eigen::VectorXd& weights, double bias,
                      const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                      double lambda, double alpha);

// Cyclic coordinate descent with an unpenalized bias. Degenerate (all-zero)
// columns keep a zero weight. Non-convergence is reported through
// FitResult::converged rather than an error.
FitResult FitElasticNet(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        const ElasticNetConfig& config);
FitResult FitElasticNet(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        const ElasticNetConfig& config,
                        const Eigen::VectorXd& initial_weights);

// Smallest lambda at which the all-zero weight vector is optimal.
double LambdaMax(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                 double alpha);

struct LassoOptions {
  double lambda_ratio = 0.1;
  SolverOptions solver;
};

FitResult FitLasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   const LassoOptions& options = {});

struct CrossValidationOptions {
  int folds = 10;
  int grid_size = 100;
  double min_ratio = 1e-3;
  double alpha = 1.0;
  SolverOptions solver;
};

// Log-spaced lambda grid, descending from lambda_max.
std::vector<double> LambdaGrid(double lambda_max, int grid_size,
                               double min_ratio);

// Held-out MSE averaged over `folds` contiguous time blocks.
double CrossValidationError(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            double lambda, const CrossValidationOptions& options);

// Selects lambda by k-fold CV over contiguous blocks (ties go to the larger
// lambda) and refits on the whole window.
FitResult FitLassoCV(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     const CrossValidationOptions& options = {});

double Predict(const FitResult& fit, std::span<const double> row);

struct ModelSpec {
  ModelVariant variant = ModelVariant::kLasso;
  // Fixed-lambda variants use lambda = ratio · lambda_max(alpha).
  double lambda_ratio = 0.1;
  int cv_folds = 10;
  SolverOptions solver;

  double alpha() const {
    return variant == ModelVariant::kElasticNet ? 0.5 : 1.0;
  }
};

FitResult FitModel(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   const ModelSpec& spec);

}  // namespace factorscope

#endif  // FACTORSCOPE_ELASTIC_NET_H_
