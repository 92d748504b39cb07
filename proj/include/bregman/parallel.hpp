#pragma once

#include <bregman/lb.hpp>

#include <utility>
#include <vector>

namespace bregman {

/// Contiguous column ranges [begin, end) partitioning [0, p).
struct ShardPlan {
  std::vector<std::pair<Index, Index>> ranges;

  Index L() const noexcept { return static_cast<Index>(ranges.size()); }
  /// Throws InvalidArgument unless the ranges partition [0, p) in order.
  void validate(Index p) const;
};

/// L nearly equal contiguous shards (the first p mod L get one extra column).
ShardPlan make_shard_plan(Index p, Index L);

struct ShardedOptions {
  Index iters = 1000;
  Index record_stride = 1;
};

/// Column-sharded linearized Bregman. Each shard owns z, beta on its columns
/// and contributes w_l = X_l beta_l; the w_l are summed by a pairwise tree in
/// ascending shard order, so the result does not depend on scheduling.
/// With L = 1 the trace is bit-identical to lb_run.
LbTrace lb_sharded(const Problem& problem, const ShardPlan& plan, double kappa, double alpha,
                   const ShardedOptions& options = {});

struct CommunicationCost {
  Index reduced_floats_per_iter;
  Index total_floats;
};

/// n (L - 1) floats per tree all-reduce; independent of p.
CommunicationCost communication_cost(const ShardPlan& plan, Index iters, Index n);

}  // namespace bregman
