#include <bregman/lasso.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace bregman {

double kkt_residual(const Problem& problem, const Vector& beta, double lambda) {
  if (beta.size() != problem.p()) throw InvalidArgument("kkt_residual: beta has wrong length");
  const Vector c = problem.X().transpose() * (problem.y() - problem.X() * beta) / double(problem.n());
  double worst = 0.0;
  for (Index i = 0; i < beta.size(); ++i) {
    const double v = beta[i] != 0.0 ? std::abs(c[i] - lambda * (beta[i] > 0 ? 1.0 : -1.0))
                                    : std::max(0.0, std::abs(c[i]) - lambda);
    worst = std::max(worst, v);
  }
  return worst;
}

double lasso_lambda_max(const Problem& problem) {
  return (problem.X().transpose() * problem.y()).cwiseAbs().maxCoeff() / double(problem.n());
}

namespace {

class CoordinateDescent {
 public:
  explicit CoordinateDescent(const Problem& problem)
      : problem_(problem),
        gram_(problem.X().transpose() * problem.X() / double(problem.n())),
        xty_(problem.X().transpose() * problem.y() / double(problem.n())) {}

  Vector solve(double lambda, Vector beta, const LassoOptions& opt) const {
    const Index p = problem_.p();
    Vector c = xty_ - gram_ * beta;  // X^T (y - X beta) / n
    Index sweeps = 0;

    // Returns the largest move of the sweep.
    auto sweep = [&](bool active_only) {
      double moved = 0.0;
      for (Index j = 0; j < p; ++j) {
        if (active_only && beta[j] == 0.0) continue;
        const double gjj = gram_(j, j);
        if (gjj <= 0.0) continue;
        const double u = c[j] + gjj * beta[j];
        const double a = std::abs(u) - lambda;
        const double next = a > 0.0 ? (u > 0 ? a : -a) / gjj : 0.0;
        const double delta = next - beta[j];
        if (delta != 0.0) {
          c.noalias() -= gram_.col(j) * delta;
          beta[j] = next;
          moved = std::max(moved, std::abs(delta));
        }
      }
      ++sweeps;
      return moved;
    };

    while (true) {
      if (sweeps >= opt.max_sweeps) {
        const double r = kkt_residual(problem_, beta, lambda);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3g", r);
        throw ConvergenceError("lasso_solve: no convergence after " + std::to_string(sweeps) +
                                   " sweeps (KKT residual " + buf + ")",
                               r);
      }
      const double full = sweep(false);
      if (full < opt.update_tol) {
        c = xty_ - gram_ * beta;
        if (kkt_residual(problem_, beta, lambda) <= opt.kkt_tol) break;
        continue;
      }
      // Coordinate descent crawls when the active Gram block is nearly singular;
      // once the sign pattern settles, solve the active system outright.
      Index inner = 0;
      while (sweeps < opt.max_sweeps && sweep(true) >= opt.update_tol) {
        if (++inner % 64 == 0 && polish(lambda, beta, opt)) {
          c = xty_ - gram_ * beta;
          break;
        }
      }
    }
    return beta;
  }

 private:
  // Solves G_AA b = X_A^T y / n - lambda sign(beta_A) on A = supp(beta). Accepted only
  // when the signs agree and the KKT check passes.
  bool polish(double lambda, Vector& beta, const LassoOptions& opt) const {
    IndexSet A;
    for (Index j = 0; j < beta.size(); ++j)
      if (beta[j] != 0.0) A.push_back(j);
    if (A.empty() || static_cast<Index>(A.size()) > problem_.n()) return false;
    const Index m = static_cast<Index>(A.size());
    Matrix G(m, m);
    Vector rhs(m);
    for (Index a = 0; a < m; ++a) {
      for (Index b = 0; b < m; ++b) G(a, b) = gram_(A[static_cast<std::size_t>(a)], A[static_cast<std::size_t>(b)]);
      const double bj = beta[A[static_cast<std::size_t>(a)]];
      rhs[a] = xty_[A[static_cast<std::size_t>(a)]] - lambda * (bj > 0 ? 1.0 : -1.0);
    }
    const Eigen::LDLT<Matrix> ldlt(G);
    if (ldlt.info() != Eigen::Success) return false;
    const Vector sol = ldlt.solve(rhs);
    Vector cand = Vector::Zero(beta.size());
    for (Index a = 0; a < m; ++a) {
      const Index j = A[static_cast<std::size_t>(a)];
      if (!std::isfinite(sol[a]) || sol[a] * beta[j] <= 0.0) return false;
      cand[j] = sol[a];
    }
    if (kkt_residual(problem_, cand, lambda) > opt.kkt_tol) return false;
    beta = cand;
    return true;
  }

  const Problem& problem_;
  Matrix gram_;
  Vector xty_;
};

}  // namespace

Vector lasso_solve(const Problem& problem, double lambda, const std::optional<Vector>& warm_start,
                   const LassoOptions& options) {
  if (!(lambda > 0.0)) throw InvalidArgument("lasso_solve: lambda must be positive");
  Vector beta = Vector::Zero(problem.p());
  if (warm_start) {
    if (warm_start->size() != problem.p()) throw InvalidArgument("lasso_solve: warm start has wrong length");
    beta = *warm_start;
  }
  return CoordinateDescent(problem).solve(lambda, std::move(beta), options);
}

std::vector<double> lasso_grid(const Problem& problem, const LassoGrid& grid) {
  const double hi = grid.lambda_max.value_or(lasso_lambda_max(problem));
  const double lo = grid.lambda_min.value_or(hi * 1e-3);
  if (!(lo > 0.0) || !(hi >= lo)) throw InvalidArgument("lasso_grid: need lambda_max >= lambda_min > 0");
  if (grid.count < 1) throw InvalidArgument("lasso_grid: count must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(grid.count));
  if (grid.count == 1) {
    out[0] = hi;
    return out;
  }
  for (Index k = 0; k < grid.count; ++k) {
    const double f = double(k) / double(grid.count - 1);
    out[static_cast<std::size_t>(k)] =
        grid.geometric ? hi * std::pow(lo / hi, f) : hi + (lo - hi) * f;
  }
  out.back() = lo;
  return out;
}

LassoPath lasso_path(const Problem& problem, const std::vector<double>& lambdas,
                     const LassoOptions& options) {
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] > 0.0)) throw InvalidArgument("lasso_path: lambdas must be positive");
    if (k > 0 && lambdas[k] > lambdas[k - 1]) throw InvalidArgument("lasso_path: lambdas must be decreasing");
  }
  const CoordinateDescent cd(problem);
  LassoPath path;
  Vector beta = Vector::Zero(problem.p());
  for (double lambda : lambdas) {
    beta = cd.solve(lambda, beta, options);
    path.lambda_grid.push_back(lambda);
    path.solutions.push_back(beta);
    path.kkt_residuals.push_back(kkt_residual(problem, beta, lambda));
  }
  return path;
}

LassoPath lasso_path(const Problem& problem, const LassoGrid& grid, const LassoOptions& options) {
  return lasso_path(problem, lasso_grid(problem, grid), options);
}

BiasDecomposition lasso_bias_decomposition(const Problem& problem, const Vector& beta_hat,
                                           double lambda, const IndexSet& support_hat) {
  if (beta_hat.size() != problem.p()) throw InvalidArgument("lasso_bias_decomposition: beta has wrong length");
  BiasDecomposition out;
  out.support = normalize_index_set(support_hat);
  if (out.support.empty()) throw InvalidArgument("lasso_bias_decomposition: empty support");
  if (out.support != support_of(beta_hat))
    throw InvalidArgument("lasso_bias_decomposition: support_hat must equal supp(beta_hat)");
  checked_singular_values(problem, out.support);
  const Matrix XS = select_columns(problem.X(), out.support);
  const double n = double(problem.n());
  const Eigen::LDLT<Matrix> gram((XS.transpose() * XS) / n);
  Vector signs(static_cast<Index>(out.support.size()));
  for (std::size_t k = 0; k < out.support.size(); ++k) {
    const double b = beta_hat[out.support[k]];
    signs[static_cast<Index>(k)] = b > 0 ? 1.0 : (b < 0 ? -1.0 : 0.0);
  }
  out.oracle_part = gram.solve(XS.transpose() * problem.y() / n);
  out.bias_part = lambda * gram.solve(signs);
  return out;
}

}  // namespace bregman
