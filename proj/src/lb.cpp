#include <bregman/lb.hpp>

#include "detail/lb_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bregman {

std::string to_string(LbStop stop) {
  switch (stop) {
    case LbStop::max_iters: return "max_iters";
    case LbStop::t_max: return "t_max";
    case LbStop::rule_residual: return "rule_residual";
    case LbStop::rule_gradient: return "rule_gradient";
  }
  return "unknown";
}

const LbRecord& LbTrace::record_at_or_before(double t) const {
  auto it = std::upper_bound(records.begin(), records.end(), t,
                             [](double v, const LbRecord& r) { return v < r.t; });
  if (it == records.begin()) throw OutOfRange("LbTrace: no record at or before t");
  return *std::prev(it);
}

double design_opnorm(const Matrix& X) {
  const double n = static_cast<double>(X.rows());
  const Matrix G = X.rows() < X.cols() ? Matrix(X * X.transpose()) : Matrix(X.transpose() * X);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(G / n, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

LbStep lb_step(const Vector& z, const Problem& problem, double kappa, double alpha) {
  if (!(kappa > 0.0) || !(alpha > 0.0)) throw InvalidArgument("lb_step: kappa and alpha must be positive");
  if (z.size() != problem.p()) throw InvalidArgument("lb_step: z has wrong length");
  const Vector beta = kappa * shrink(z, 1.0);
  const Vector residual = problem.y() - problem.X() * beta;
  LbStep out{z, Vector(problem.p())};
  Vector fit(problem.n());
  detail::lb_block_update(problem.X(), residual, alpha / double(problem.n()), kappa, out.z,
                          out.beta, fit);
  return out;
}

namespace {

bool rule_fires(const LbStopRule& rule, const Problem& problem, const Vector& residual,
                const Vector& correlation) {
  const double n = static_cast<double>(problem.n());
  if (rule.kind == LbStopRule::Kind::residual) {
    return residual.norm() <= rule.sigma * std::sqrt(n + 2.0 * std::sqrt(n * std::log(n)));
  }
  const double max_col = problem.X().colwise().norm().maxCoeff();
  const double threshold = rule.gradient_factor * 2.0 * rule.sigma *
                           std::sqrt(max_col * std::log(double(problem.p())));
  return correlation.cwiseAbs().maxCoeff() <= threshold;
}

}  // namespace

LbTrace lb_run(const Problem& problem, double kappa, double alpha, const LbOptions& options) {
  if (!(kappa > 0.0) || !(alpha > 0.0)) throw InvalidArgument("lb_run: kappa and alpha must be positive");
  if (options.record_stride < 1) throw InvalidArgument("lb_run: record_stride must be >= 1");
  if (options.max_iters < 0) throw InvalidArgument("lb_run: max_iters must be nonnegative");
  if (options.gram_form && options.stop_rule) throw InvalidArgument("lb_run: gram_form does not support stop rules");

  const Index p = problem.p();
  const double n = static_cast<double>(problem.n());
  const double step = alpha / n;

  LbTrace trace;
  trace.kappa = kappa;
  trace.alpha = alpha;
  trace.first_entry.assign(static_cast<std::size_t>(p), -1);

  const double opnorm = design_opnorm(problem.X());
  if (kappa * alpha * opnorm >= 2.0) {
    trace.step_condition_violated = true;
    std::ostringstream msg;
    msg << "kappa*alpha*lambda_max(X^T X/n) = " << kappa * alpha * opnorm
        << " >= 2; iterates may oscillate or diverge";
    trace.warnings.push_back(msg.str());
  }

  std::vector<double> pending = options.record_at_times;
  std::sort(pending.begin(), pending.end());
  std::size_t next_pending = 0;

  Vector z = Vector::Zero(p);
  Vector beta = Vector::Zero(p);
  Vector fit = Vector::Zero(problem.n());
  Vector residual = problem.y();
  const double grad_scale = std::max((problem.X().transpose() * problem.y()).cwiseAbs().maxCoeff() / n, 1e-300);

  Matrix gram;
  Vector xty_n;
  Vector grad;
  IndexSet active;
  if (options.gram_form) {
    gram = problem.X().transpose() * problem.X() / n;
    xty_n = problem.X().transpose() * problem.y() / n;
  }

  auto record = [&](Index k) {
    if (!trace.records.empty() && trace.records.back().k == k) return;
    trace.records.push_back({k, static_cast<double>(k) * alpha, z, beta});
  };

  Index k = 0;
  while (true) {
    const double t = static_cast<double>(k) * alpha;
    bool keep = (k % options.record_stride == 0);
    while (next_pending < pending.size() && pending[next_pending] <= t) {
      keep = true;
      ++next_pending;
    }
    if (keep) record(k);

    if (options.stop_rule) {
      const Vector corr = problem.X().transpose() * residual;
      if (rule_fires(*options.stop_rule, problem, residual, corr)) {
        trace.stopping_reason = options.stop_rule->kind == LbStopRule::Kind::residual
                                    ? LbStop::rule_residual
                                    : LbStop::rule_gradient;
        break;
      }
    }
    if (k >= options.max_iters) {
      trace.stopping_reason = LbStop::max_iters;
      break;
    }
    if (static_cast<double>(k + 1) * alpha > options.t_max) {
      trace.stopping_reason = LbStop::t_max;
      break;
    }

    double blowup = 0.0;
    if (options.gram_form) {
      grad = xty_n;
      for (Index j : active) grad.noalias() -= gram.col(j) * beta[j];
      z.noalias() += alpha * grad;
      active.clear();
      for (Index i = 0; i < p; ++i) {
        const double v = z[i];
        beta[i] = v > 1.0 ? kappa * (v - 1.0) : (v < -1.0 ? kappa * (v + 1.0) : 0.0);
        if (beta[i] != 0.0) active.push_back(i);
      }
      blowup = grad.cwiseAbs().maxCoeff() / grad_scale;
    } else {
      detail::lb_block_update(problem.X(), residual, step, kappa, z, beta, fit);
      residual = problem.y() - fit;
      blowup = residual.cwiseAbs().maxCoeff() / std::max(problem.y().cwiseAbs().maxCoeff(), grad_scale);
    }
    ++k;

    if (!std::isfinite(blowup) || !z.allFinite() || blowup > options.divergence_factor) {
      std::ostringstream msg;
      msg << "linearized Bregman iteration diverged at k = " << k
          << "; the step size must satisfy kappa*alpha*lambda_max(X^T X/n) < 2 (currently "
          << kappa * alpha * opnorm << ")";
      throw DivergenceError(msg.str());
    }
    for (Index i = 0; i < p; ++i) {
      auto& fe = trace.first_entry[static_cast<std::size_t>(i)];
      if (fe < 0 && beta[i] != 0.0) fe = k;
    }
  }
  record(k);
  trace.iterations = k;
  return trace;
}

}  // namespace bregman
