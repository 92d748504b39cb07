#pragma once

#include <bregman/error.hpp>
#include <bregman/types.hpp>

#include <cmath>
#include <optional>

namespace bregman {

/// Observed data (y, X) of the linear model y = X beta* + eps.
///
/// Immutable after construction. Column norms are cached in the
/// n-normalized convention ||X_j||_n = ||X_j|| / sqrt(n).
class Problem {
 public:
  Problem(Matrix X, Vector y);

  const Matrix& X() const noexcept { return X_; }
  const Vector& y() const noexcept { return y_; }
  const Vector& column_norms_n() const noexcept { return column_norms_n_; }
  Index n() const noexcept { return X_.rows(); }
  Index p() const noexcept { return X_.cols(); }

  /// The problem with only the columns in `cols` (same y).
  Problem restricted(const IndexSet& cols) const;

 private:
  Matrix X_;
  Vector y_;
  Vector column_norms_n_;
};

/// Planted signal of a synthetic instance.
struct GroundTruth {
  Vector beta_star;
  IndexSet support;
  double sigma = 0.0;

  /// Builds the truth from beta*, deriving the support.
  static GroundTruth from_beta(Vector beta_star, double sigma);

  Index p() const noexcept { return beta_star.size(); }
  Index s() const noexcept { return static_cast<Index>(support.size()); }
  IndexSet complement() const { return complement_of(support, p()); }
  double beta_min() const;
  double beta_max() const;
};

/// Theory-side summary of a design restricted to a support S.
struct ConditionReport {
  double gamma = 0.0;      ///< lambda_min(X_S^T X_S / n)
  double gamma_max = 0.0;  ///< lambda_max(X_S^T X_S / n)
  double eta = 0.0;        ///< 1 - ||X_T^* X_S^dagger||_inf
  double mu = 0.0;         ///< mutual coherence of the normalized design
  Index s = 0;
  double cond_number = 1.0;
  double max_colnorm_T = 0.0;  ///< max_{j in T} ||X_j||_n
  std::optional<double> tau_bar;
  std::optional<double> B;
};

/// Componentwise soft thresholding sign(z) * max(|z| - lambda, 0).
template <typename Derived>
VectorX<typename Derived::Scalar> shrink(const Eigen::MatrixBase<Derived>& z,
                                         typename Derived::Scalar lambda) {
  using Scalar = typename Derived::Scalar;
  if (!(lambda >= Scalar(0))) throw InvalidArgument("shrink: lambda must be nonnegative");
  return z.unaryExpr([lambda](Scalar v) {
    const Scalar m = std::abs(v) - lambda;
    if (m <= Scalar(0)) return Scalar(0);
    return v > Scalar(0) ? m : -m;
  });
}

/// Least squares restricted to `support`; zero elsewhere.
/// Throws SingularMatrixError when X_S is numerically rank deficient.
Vector oracle_estimator(const Problem& problem, const IndexSet& support);

/// Singular values of X_S / sqrt(n), descending. Throws SingularMatrixError
/// when the smallest is below 1e-10 times the largest.
Vector checked_singular_values(const Problem& problem, const IndexSet& support);

/// max_{i != j} |<X_i, X_j>_n| after normalizing every column to ||X_j||_n = 1.
double mutual_coherence(const Matrix& X);

/// max_{j in cols} ||X_j||_n (0 for an empty set).
double max_column_norm_n(const Problem& problem, const IndexSet& cols);

/// gamma, eta, mu, condition number for `support`; tau_bar is filled when
/// sigma is given (and p >= 2).
ConditionReport check_conditions(const Problem& problem, const IndexSet& support,
                                 std::optional<double> sigma = std::nullopt);

struct CoherenceBounds {
  double gamma;
  double eta;
};

/// The (gamma, eta) implied by mutual incoherence mu < 1/(2s - 1).
CoherenceBounds coherence_bounds(double mu, Index s);

/// Stopping time (eta / 2 sigma) sqrt(n / log p) / max_colnorm_T, with eta
/// replaced by (1 - B/(kappa eta)) eta when kappa and B are both given.
double tau_bar(double eta, double sigma, Index n, Index p, double max_colnorm_T,
               std::optional<double> kappa = std::nullopt,
               std::optional<double> B = std::nullopt);

/// beta*_max + 2 sigma sqrt(log p / (gamma n)) + (||X beta*|| + 2 sigma sqrt(s log n)) / (n sqrt(gamma)).
double lbiss_bound_B(const Problem& problem, const GroundTruth& truth, double gamma);

}  // namespace bregman
