#pragma once

#include <bregman/model.hpp>

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace bregman {

struct LbStep {
  Vector z;
  Vector beta;
};

/// One linearized Bregman iteration from z:
///   z' = z + (alpha/n) X^T (y - X kappa shrink(z, 1)),  beta' = kappa shrink(z', 1).
LbStep lb_step(const Vector& z, const Problem& problem, double kappa, double alpha);

enum class LbStop : std::uint8_t { max_iters, t_max, rule_residual, rule_gradient };

std::string to_string(LbStop stop);

/// Data-dependent stopping rule evaluated on the residual y - X beta_k.
struct LbStopRule {
  enum class Kind : std::uint8_t { residual, gradient } kind = Kind::residual;
  double sigma = 1.0;
  /// Multiplier on the gradient-rule threshold.
  double gradient_factor = 1.0;
};

struct LbOptions {
  Index max_iters = 1000000;
  double t_max = std::numeric_limits<double>::infinity();
  /// Keep every record_stride-th iterate (k = 0 always kept, plus the last).
  Index record_stride = 1;
  /// Additionally record the first iterate with t_k >= each of these times.
  std::vector<double> record_at_times;
  std::optional<LbStopRule> stop_rule;
  /// Residual growth beyond this factor of ||X^T y / n||_inf counts as divergence.
  double divergence_factor = 1e8;
  /// Evaluate X^T (y - X beta) / n as X^T y / n - G_A beta_A with the cached
  /// Gram matrix G = X^T X / n over the active columns A. Same iteration,
  /// different rounding; much cheaper while beta is sparse. Incompatible with stop_rule.
  bool gram_form = false;
};

struct LbRecord {
  Index k = 0;
  double t = 0.0;
  Vector z;
  Vector beta;
};

/// Iterate history of a linearized Bregman run started from z_0 = 0.
struct LbTrace {
  double kappa = 0.0;
  double alpha = 0.0;
  std::vector<LbRecord> records;
  LbStop stopping_reason = LbStop::max_iters;
  Index iterations = 0;
  /// First iteration at which each coordinate became nonzero, -1 if never.
  std::vector<Index> first_entry;
  /// kappa * alpha * lambda_max(X^T X / n) >= 2 at launch.
  bool step_condition_violated = false;
  std::vector<std::string> warnings;

  const LbRecord& final_record() const { return records.back(); }
  /// The recorded iterate with the largest t_k <= t (records must cover t).
  const LbRecord& record_at_or_before(double t) const;
};

/// lambda_max(X^T X / n).
double design_opnorm(const Matrix& X);

/// Runs lb_step from z = 0 until max_iters, t_max or the stop rule fires.
/// Throws DivergenceError when iterates become non-finite or explode.
LbTrace lb_run(const Problem& problem, double kappa, double alpha, const LbOptions& options = {});

struct LbissOptions {
  double t_max = 1.0;
  /// Times at which (rho, beta) are reported; must lie in [0, t_max].
  std::vector<double> sample_times;
  /// Width of the bracket locating threshold crossings of |z_i| = 1.
  double event_tol = 1e-10;
  /// Local error target of the step-doubling RK4 integrator.
  double local_tol = 1e-12;
  /// Maximum number of located events; defaults to 100 p when zero.
  Index max_events = 0;
};

/// Samples of the continuous linearized Bregman inverse scale space.
struct LbissSamples {
  double kappa = 0.0;
  std::vector<double> times;
  std::vector<Vector> rho;
  std::vector<Vector> beta;
  std::vector<Vector> z;
  std::vector<double> event_times;
  bool truncated = false;
};

/// Integrates z' = (1/n) X^T (y - kappa X shrink(z, 1)) from z(0) = 0.
LbissSamples lbiss_integrate(const Problem& problem, double kappa, const LbissOptions& options);

}  // namespace bregman
