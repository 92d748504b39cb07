#pragma once

#include <bregman/iss.hpp>
#include <bregman/lasso.hpp>
#include <bregman/lb.hpp>
#include <bregman/model.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace bregman {

enum class Covariance : std::uint8_t { identity, constant_offdiag };

struct ExperimentConfig {
  Index n = 80;
  Index p = 100;
  Index s = 30;
  double sigma = 1.0;
  Covariance covariance = Covariance::constant_offdiag;
  /// Off-diagonal of Sigma; unset means 1 / (3p).
  std::optional<double> offdiag;
  std::vector<double> kappa_list{4.0, 64.0, 1024.0};
  /// kappa * alpha, held fixed across kappa_list.
  double kappa_alpha = 0.1;
  Index reps = 100;
  std::uint64_t seed = 2016;
  Index lasso_grid_count = 200;
  /// LB runs until t >= lb_horizon_factor * (last ISS breakpoint).
  double lb_horizon_factor = 1.5;
  Index lb_max_iters = 1000000;
  /// 0: take ISS_SPARSE_THREADS or hardware concurrency.
  unsigned threads = 0;

  double offdiag_value() const { return offdiag.value_or(1.0 / (3.0 * double(p))); }
  /// Throws InvalidArgument on inconsistent fields.
  void validate() const;
};

/// Independent generator for repetition `rep` of master seed `seed`.
std::mt19937_64 rng_stream(std::uint64_t seed, std::uint64_t rep);

struct Instance {
  Problem problem;
  GroundTruth truth;
  Vector epsilon;
};

/// Rows of X i.i.d. N(0, Sigma) through the Cholesky factor of Sigma; beta*_j = r_j + sign(r_j),
/// r_j ~ N(0, 1) on the first s coordinates; y = X beta* + sigma N(0, I).
Instance generate_instance(const ExperimentConfig& config, std::mt19937_64& rng);
Instance generate_instance(const ExperimentConfig& config, Index rep);

struct SelectionEvent {
  Index coordinate;
  /// Entry time t (ISS, LB: k alpha) or 1 / lambda (LASSO).
  double time;
};

/// First-entry events sorted by time, ties by index; never-selected coordinates omitted.
std::vector<SelectionEvent> selection_order(const IssPath& path);
std::vector<SelectionEvent> selection_order(const LbTrace& trace);
std::vector<SelectionEvent> selection_order(const LassoPath& path);

struct RocResult {
  std::vector<SelectionEvent> events;
  std::vector<double> fpr;
  std::vector<double> tpr;
  double auc = 0.0;
};

/// ROC curve over the selection order. Events sharing a time form one step;
/// unselected coordinates follow one at a time in ascending index order.
RocResult roc_auc(const std::vector<SelectionEvent>& order, const GroundTruth& truth);

struct AucRow {
  std::string method;
  double kappa = 0.0;  ///< 0 for iss / lasso
  double sigma = 0.0;
  Index rep = 0;
  double auc = 0.0;
};

struct MethodSummary {
  std::string method;
  double kappa = 0.0;
  double mean_auc = 0.0;
  double std_auc = 0.0;  ///< sample standard deviation, 0 when fewer than 2 reps
  Index reps = 0;
  Index failed = 0;
};

struct AucStudy {
  double sigma = 0.0;
  std::vector<MethodSummary> summary;  ///< iss, lasso, then lb per kappa
  std::vector<AucRow> rows;            ///< ascending rep, then method order
  std::vector<std::string> diagnostics;
};

/// Threads used for rep fan-out: config.threads, else ISS_SPARSE_THREADS, else hardware.
unsigned study_threads(const ExperimentConfig& config);

AucStudy run_auc_study(const ExperimentConfig& config);

enum class StopKind : std::uint8_t { tau_bar, residual_rule, gradient_rule };

struct SignTrialResult {
  bool hit = false;
  std::optional<double> first_hit_t;
  double stop_time = 0.0;
  /// ||beta(first hit) - oracle||_inf when hit.
  std::optional<double> oracle_gap;
};

/// Whether the ISS path reaches sign(beta) = sign(beta*) at some t <= stop time.
SignTrialResult sign_consistency_trial(const Problem& problem, const GroundTruth& truth, StopKind stop,
                                       double gradient_factor = 1.0);

enum class Method : std::uint8_t { iss, lb, lasso };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct StopRunOptions {
  Method method = Method::iss;
  StopKind rule = StopKind::residual_rule;
  double sigma = 1.0;
  double gradient_factor = 1.0;
  double kappa = 64.0;
  double alpha = 0.1 / 64.0;
  Index max_iters = 1000000;
  Index lasso_grid_count = 200;
};

struct StopRunResult {
  bool fired = false;
  double time = 0.0;  ///< t (ISS, LB) or 1 / lambda (LASSO)
  Vector beta;
  IndexSet support;
  double threshold = 0.0;
  double statistic = 0.0;  ///< ||r|| or ||X^T r||_inf at the stop
};

/// Walks the path of `options.method` and stops at the first point where the
/// data-dependent rule holds.
StopRunResult stop_run(const Problem& problem, const StopRunOptions& options);

}  // namespace bregman
