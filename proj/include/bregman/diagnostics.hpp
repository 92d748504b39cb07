#pragma once

#include <bregman/lb.hpp>
#include <bregman/model.hpp>

#include <limits>
#include <optional>
#include <vector>

namespace bregman {

/// <beta_ref, rho_ref - rho>. Both rho's are validated as l1 subgradients:
/// |rho_i| <= 1 + 1e-9 and rho_i beta_i = |beta_i| within 1e-9.
double bregman_distance(const Vector& beta_ref, const Vector& rho_ref, const Vector& beta,
                        const Vector& rho);

/// bregman_distance + ||beta - beta_ref||^2 / (2 kappa); kappa = +inf drops the quadratic.
double potential(const Vector& beta_ref, const Vector& rho_ref, const Vector& beta, const Vector& rho,
                 double kappa);

/// Piecewise F: x/2kappa plus 0 below beta_min^2, 2x/beta_min up to s beta_min^2, 2 sqrt(xs) beyond.
/// F jumps by 2 beta_min at x = beta_min^2 and is continuous at x = s beta_min^2.
double bihari_F(double x, double kappa, double beta_min_tilde, Index s);

/// Right-continuous inverse inf{x >= 0 : F(x) > y}, by bisection to 1e-12 relative.
double bihari_F_inverse(double y, double kappa, double beta_min_tilde, Index s);

struct StoppingTimeBounds {
  double tau1;  ///< bound on the first sign-consistent time
  double tau2;  ///< bound on the first time ||beta - beta_tilde|| <= C sqrt(s log p / n)
  double gamma_tilde;
};

/// Continuous bounds when alpha/opnorm_S are absent; the discrete ones (gamma
/// reduced by the step factor, plus 3 alpha and 2 alpha) otherwise.
StoppingTimeBounds stopping_time_bounds(const Vector& beta_tilde, double kappa, double gamma, double C,
                                        Index n, Index p, std::optional<double> alpha = std::nullopt,
                                        std::optional<double> opnorm_S = std::nullopt);

struct ResidualDecomposition {
  double signal_norm;  ///< ||X_S (beta_tilde_S - beta_S)||
  double noise_norm;   ///< ||(I - P_S) y||, equal to ||(I - P_S) eps|| in the noiseless-signal model
  double total;        ///< sqrt(signal^2 + noise^2)
  /// ||(I - P_S) epsilon|| when epsilon is supplied.
  std::optional<double> noise_from_epsilon;
};

/// Orthogonal split of ||y - X beta|| for beta supported on S.
ResidualDecomposition residual_decomposition(const Problem& problem, const IndexSet& support,
                                             const Vector& beta,
                                             const std::optional<Vector>& epsilon_known = std::nullopt);

/// sigma sqrt(n + 2 sqrt(n log n)).
double residual_rule_threshold(double sigma, Index n);
bool stop_rule_residual(const Vector& residual, double sigma, Index n);

/// factor * 2 sigma sqrt(max_i ||X_i|| log p), with ||X_i|| the plain l2 column norm.
double gradient_rule_threshold(const Problem& problem, double sigma, double factor = 1.0);
bool stop_rule_gradient(const Problem& problem, const Vector& residual, double sigma, double factor = 1.0);

/// Right side of the strong-signal condition on beta*_min.
double strong_signal_threshold(const ConditionReport& report, double sigma, Index n, Index p,
                               double max_colnorm_T);
bool strong_signal_check(const ConditionReport& report, const GroundTruth& truth, Index n, Index p,
                         double max_colnorm_T);

/// Right side of the second beta_min condition for residual-rule consistency.
double residual_rule_signal_threshold(double gamma, double sigma, Index n, Index s);

struct PotentialTrace {
  std::vector<double> times;
  std::vector<double> psi;
  std::vector<double> distance;
  std::vector<double> fit_error;  ///< ||X_S (beta - beta_tilde)||
};

/// Potential along an LB trace run on the restricted design X_S.
/// The dual of each record is rho = z - beta / kappa.
PotentialTrace potential_trace(const LbTrace& trace, const Problem& restricted, const Vector& beta_tilde);

struct BihariCheck {
  bool holds;
  double worst_slack;  ///< min over k of  -alpha gamma_tilde F^{-1}(Psi_k) + 1e-9 - (Psi_{k+1} - Psi_k)
  double gamma_tilde;
};

/// Checks Psi_{k+1} - Psi_k <= -alpha gamma_tilde F^{-1}(Psi_k) + 1e-9 at every step of a
/// stride-1 trace of the restricted dynamics.
BihariCheck verify_discrete_bihari(const LbTrace& trace, const Problem& restricted,
                                   const Vector& beta_tilde, double gamma, double kappa, double alpha,
                                   double opnorm_S);

}  // namespace bregman
