#include <bregman/parallel.hpp>

#include "detail/lb_kernel.hpp"

#include <atomic>
#include <barrier>
#include <cmath>
#include <string>
#include <thread>

namespace bregman {

void ShardPlan::validate(Index p) const {
  if (ranges.empty()) throw InvalidArgument("ShardPlan: need at least one shard");
  Index expect = 0;
  for (const auto& [b, e] : ranges) {
    if (b != expect || e <= b) throw InvalidArgument("ShardPlan: ranges must be contiguous and nonempty");
    expect = e;
  }
  if (expect != p)
    throw InvalidArgument("ShardPlan: ranges cover " + std::to_string(expect) + " columns, problem has " +
                          std::to_string(p));
}

ShardPlan make_shard_plan(Index p, Index L) {
  if (L < 1 || L > p) throw InvalidArgument("make_shard_plan: need 1 <= L <= p");
  ShardPlan plan;
  const Index base = p / L, extra = p % L;
  Index at = 0;
  for (Index l = 0; l < L; ++l) {
    const Index len = base + (l < extra ? 1 : 0);
    plan.ranges.emplace_back(at, at + len);
    at += len;
  }
  return plan;
}

CommunicationCost communication_cost(const ShardPlan& plan, Index iters, Index n) {
  const Index per = n * (plan.L() - 1);
  return {per, per * iters};
}

LbTrace lb_sharded(const Problem& problem, const ShardPlan& plan, double kappa, double alpha,
                   const ShardedOptions& options) {
  plan.validate(problem.p());
  if (!(kappa > 0.0) || !(alpha > 0.0)) throw InvalidArgument("lb_sharded: kappa and alpha must be positive");
  if (options.iters < 0 || options.record_stride < 1) throw InvalidArgument("lb_sharded: bad options");

  const Index p = problem.p();
  const Index L = plan.L();
  const double step = alpha / double(problem.n());

  LbTrace trace;
  trace.kappa = kappa;
  trace.alpha = alpha;
  trace.first_entry.assign(static_cast<std::size_t>(p), -1);
  const double opnorm = design_opnorm(problem.X());
  if (kappa * alpha * opnorm >= 2.0) {
    trace.step_condition_violated = true;
    trace.warnings.push_back("kappa*alpha*lambda_max(X^T X/n) >= 2; iterates may diverge");
  }

  Vector z = Vector::Zero(p);
  Vector beta = Vector::Zero(p);
  Vector residual = problem.y();
  std::vector<Vector> parts(static_cast<std::size_t>(L), Vector::Zero(problem.n()));
  Index k = 0;
  bool diverged = false;
  std::atomic<bool> done{options.iters == 0};
  trace.records.push_back({0, 0.0, z, beta});

  auto reduce = [&]() noexcept {
    for (Index stride = 1; stride < L; stride *= 2)
      for (Index l = 0; l + stride < L; l += 2 * stride)
        parts[static_cast<std::size_t>(l)] += parts[static_cast<std::size_t>(l + stride)];
    residual = problem.y() - parts[0];
    ++k;
    if (!residual.allFinite() || !z.allFinite()) {
      diverged = true;
      done = true;
      return;
    }
    for (Index i = 0; i < p; ++i) {
      auto& fe = trace.first_entry[static_cast<std::size_t>(i)];
      if (fe < 0 && beta[i] != 0.0) fe = k;
    }
    if (k % options.record_stride == 0 || k == options.iters)
      trace.records.push_back({k, double(k) * alpha, z, beta});
    if (k >= options.iters) done = true;
  };

  std::barrier sync(static_cast<std::ptrdiff_t>(L), reduce);
  auto worker = [&](Index l) {
    const auto [b, e] = plan.ranges[static_cast<std::size_t>(l)];
    const auto Xl = problem.X().middleCols(b, e - b);
    while (!done.load()) {
      detail::lb_block_update(Xl, residual, step, kappa, z.segment(b, e - b), beta.segment(b, e - b),
                              parts[static_cast<std::size_t>(l)]);
      sync.arrive_and_wait();
    }
  };
  {
    std::vector<std::jthread> threads;
    for (Index l = 1; l < L; ++l) threads.emplace_back(worker, l);
    worker(0);
  }
  if (diverged)
    throw DivergenceError("lb_sharded: iterates diverged at k = " + std::to_string(k) +
                          "; the step size must satisfy kappa*alpha*lambda_max(X^T X/n) < 2");
  trace.stopping_reason = LbStop::max_iters;
  trace.iterations = k;
  return trace;
}

}  // namespace bregman
