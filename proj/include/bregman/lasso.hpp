#pragma once

#include <bregman/model.hpp>

#include <optional>
#include <vector>

namespace bregman {

/// Largest KKT violation of beta for min lambda ||beta||_1 + ||y - X beta||^2 / (2n).
double kkt_residual(const Problem& problem, const Vector& beta, double lambda);

struct LassoOptions {
  /// Sweeps stop once the largest coordinate move is below this.
  double update_tol = 1e-12;
  double kkt_tol = 1e-8;
  Index max_sweeps = 1000000;
};

/// Cyclic coordinate descent with an active-set inner loop.
/// Throws ConvergenceError (carrying the KKT residual) at the sweep cap.
Vector lasso_solve(const Problem& problem, double lambda,
                   const std::optional<Vector>& warm_start = std::nullopt,
                   const LassoOptions& options = {});

/// ||X^T y / n||_inf, the smallest lambda with solution zero.
double lasso_lambda_max(const Problem& problem);

struct LassoGrid {
  /// Defaults to lasso_lambda_max.
  std::optional<double> lambda_max;
  /// Defaults to lambda_max * 1e-3.
  std::optional<double> lambda_min;
  Index count = 100;
  bool geometric = true;
};

/// Decreasing lambda grid described by `grid` on `problem`.
std::vector<double> lasso_grid(const Problem& problem, const LassoGrid& grid);

struct LassoPath {
  std::vector<double> lambda_grid;
  std::vector<Vector> solutions;
  std::vector<double> kkt_residuals;
};

/// Warm-started sweep from the largest lambda down.
LassoPath lasso_path(const Problem& problem, const LassoGrid& grid = {},
                     const LassoOptions& options = {});

/// Solutions at an explicit decreasing list of lambdas.
LassoPath lasso_path(const Problem& problem, const std::vector<double>& lambdas,
                     const LassoOptions& options = {});

struct BiasDecomposition {
  IndexSet support;
  /// (X_S^* X_S)^{-1} X_S^* y on the support.
  Vector oracle_part;
  /// lambda (X_S^* X_S)^{-1} sign(beta_hat_S).
  Vector bias_part;
};

/// beta_hat_S = oracle_part - bias_part for a LASSO solution with support S.
BiasDecomposition lasso_bias_decomposition(const Problem& problem, const Vector& beta_hat,
                                           double lambda, const IndexSet& support_hat);

}  // namespace bregman
