#pragma once

#include <bregman/iss.hpp>

namespace bregman::detail {

/// Sign-constrained least squares on a fixed problem, with X^T X and X^T y
/// cached so repeated solves (one per ISS breakpoint) stay cheap.
class SignLsSolver {
 public:
  explicit SignLsSolver(const Problem& problem);

  /// `signs[i]` is +1 / -1 for constrained coordinates and 0 for fixed zeros.
  SignConstrainedLsResult solve(const std::vector<std::int8_t>& signs,
                                const IndexSet& warm_start) const;

  /// X^T (y - X beta), unnormalized.
  Vector correlation(const Vector& beta) const;

  const Matrix& gram() const noexcept { return gram_; }
  const Vector& xty() const noexcept { return xty_; }

 private:
  Vector least_squares_on(const IndexSet& passive, bool& rank_deficient) const;

  const Problem& problem_;
  Matrix gram_;
  Vector xty_;
  double kkt_scale_;
};

}  // namespace bregman::detail
