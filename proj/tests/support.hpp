#pragma once

#include <bregman/model.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

// Test-side oracles. None of these call into the library's solvers.
namespace testing_support {

using bregman::Index;
using bregman::Matrix;
using bregman::Vector;

inline Matrix gaussian(Index n, Index p, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  Matrix X(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) X(i, j) = N(rng);
  return X;
}

inline Vector gaussian(Index n, std::mt19937_64& rng) { return gaussian(n, 1, rng).col(0); }

// Columns with x_i ~ N(0, (1 - c) I + c 11^T) by the shared-factor construction.
inline Matrix correlated(Index n, Index p, double c, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  Matrix X(n, p);
  for (Index i = 0; i < n; ++i) {
    const double shared = N(rng);
    for (Index j = 0; j < p; ++j) X(i, j) = std::sqrt(1.0 - c) * N(rng) + std::sqrt(c) * shared;
  }
  return X;
}

// Least squares on the listed columns by Householder QR.
inline Vector qr_least_squares(const Matrix& X, const Vector& y, const std::vector<Index>& cols) {
  Vector out = Vector::Zero(X.cols());
  if (cols.empty()) return out;
  Matrix XS(X.rows(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) XS.col(static_cast<Index>(k)) = X.col(cols[k]);
  const Vector b = XS.householderQr().solve(y);
  for (std::size_t k = 0; k < cols.size(); ++k) out[cols[k]] = b[static_cast<Index>(k)];
  return out;
}

// min ||y - X b||^2 with sign(b_i) restricted by signs[i] in {-1, 0, +1} (0 means b_i = 0).
// Enumerates every subset of the constrained coordinates as the free set and keeps the best
// feasible unconstrained fit.
inline double brute_force_sign_ls(const Matrix& X, const Vector& y, const std::vector<int>& signs, Vector* best_beta = nullptr) {
  std::vector<Index> cand;
  for (std::size_t i = 0; i < signs.size(); ++i)
    if (signs[i] != 0) cand.push_back(static_cast<Index>(i));
  double best = std::numeric_limits<double>::infinity();
  const std::size_t m = cand.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    std::vector<Index> cols;
    for (std::size_t k = 0; k < m; ++k)
      if (mask & (std::size_t{1} << k)) cols.push_back(cand[k]);
    const Vector b = qr_least_squares(X, y, cols);
    bool ok = true;
    for (Index c : cols)
      if (signs[static_cast<std::size_t>(c)] * b[c] < -1e-12) ok = false;
    if (!ok) continue;
    const double f = (y - X * b).squaredNorm();
    if (f < best) {
      best = f;
      if (best_beta) *best_beta = b;
    }
  }
  return best;
}

// Fine-step simulation of the inclusion rho' = X^T (y - X beta)/n, rho in d||beta||_1,
// through its large-damping smoothing z' = X^T (y - X kappa shrink(z))/n, forward Euler.
// Returns X beta at each of the requested (increasing) times.
inline std::vector<Vector> simulate_inclusion_fit(const Matrix& X, const Vector& y, double kappa, double dt,
                                                  const std::vector<double>& times) {
  const Index n = X.rows(), p = X.cols();
  Vector z = Vector::Zero(p), beta = Vector::Zero(p);
  std::vector<Vector> out;
  double t = 0.0;
  for (double target : times) {
    while (t + 0.5 * dt < target) {
      const Vector g = X.transpose() * (y - X * beta) / double(n);
      z += dt * g;
      for (Index i = 0; i < p; ++i) {
        const double a = std::abs(z[i]) - 1.0;
        beta[i] = a > 0 ? kappa * (z[i] > 0 ? a : -a) : 0.0;
      }
      t += dt;
    }
    out.push_back(X * beta);
  }
  return out;
}

// Proximal gradient for lambda ||b||_1 + ||y - X b||^2/(2n), run to a fixed point.
inline Vector prox_gradient_lasso(const Matrix& X, const Vector& y, double lambda, int iters = 200000) {
  const double n = double(X.rows());
  const Matrix G = X.transpose() * X / n;
  const Vector c = X.transpose() * y / n;
  const double L = Eigen::SelfAdjointEigenSolver<Matrix>(G).eigenvalues().maxCoeff();
  Vector b = Vector::Zero(X.cols());
  for (int k = 0; k < iters; ++k) {
    const Vector u = b - (G * b - c) / L;
    Vector next(b.size());
    for (Index i = 0; i < b.size(); ++i) {
      const double a = std::abs(u[i]) - lambda / L;
      next[i] = a > 0 ? (u[i] > 0 ? a : -a) : 0.0;
    }
    const double moved = (next - b).cwiseAbs().maxCoeff();
    b = next;
    if (moved < 1e-16) break;
  }
  return b;
}

inline double lasso_objective(const Matrix& X, const Vector& y, double lambda, const Vector& b) {
  return lambda * b.lpNorm<1>() + (y - X * b).squaredNorm() / (2.0 * double(X.rows()));
}

}  // namespace testing_support
