#pragma once

#include <bregman/types.hpp>

namespace bregman::detail {

/// Column-block half of one linearized Bregman iteration.
///
///   z_block    += step * X_block^T residual
///   beta_block  = kappa * shrink(z_block, 1)
///   fit_part    = X_block * beta_block
///
/// Serial runs call this once with the whole design; sharded runs call it
/// per shard and sum the fit parts, so L = 1 reproduces the serial bits.
template <typename BlockX, typename ZRef, typename BetaRef>
void lb_block_update(const BlockX& X_block, const Vector& residual, double step, double kappa,
                     ZRef&& z_block, BetaRef&& beta_block, Vector& fit_part) {
  z_block.noalias() += step * (X_block.transpose() * residual);
  for (Index i = 0; i < z_block.size(); ++i) {
    const double v = z_block[i];
    beta_block[i] = v > 1.0 ? kappa * (v - 1.0) : (v < -1.0 ? kappa * (v + 1.0) : 0.0);
  }
  fit_part.noalias() = X_block * beta_block;
}

}  // namespace bregman::detail
