#pragma once

#include <bregman/model.hpp>

#include <cstdint>
#include <limits>
#include <vector>

namespace bregman {

struct SignConstrainedLsResult {
  Vector beta;
  /// Lagrange multiplier of each sign constraint, s_i * (X^T (X beta - y))_i,
  /// nonnegative at optimality; zero for unconstrained and fixed-zero entries.
  Vector multipliers;
  /// Set when the passive columns are rank deficient, so beta is only one of
  /// several minimizers (the one of least l2 norm on that pattern).
  bool non_unique = false;
  int iterations = 0;
};

/// min ||y - X beta||^2 subject to beta_i >= 0 on `plus_set`, beta_i <= 0 on
/// `minus_set` and beta_j = 0 elsewhere.
///
/// Lawson-Hanson style primal active-set method. `warm_start` seeds the
/// passive set (entries outside plus/minus are ignored).
SignConstrainedLsResult solve_sign_constrained_ls(const Problem& problem, const IndexSet& plus_set,
                                                  const IndexSet& minus_set,
                                                  const IndexSet& warm_start = {});

struct IssOptions {
  double t_max = std::numeric_limits<double>::infinity();
  Index max_breakpoints = 100000;
  /// |rho_i| >= 1 - boundary_tol counts as on the boundary.
  double boundary_tol = 1e-9;
  /// Gradient entries below grad_tol * ||X^T y / n||_inf are treated as zero.
  double grad_tol = 1e-11;
};

enum class IssStop : std::uint8_t { terminated, t_max, max_breakpoints };

/// Exact piecewise Bregman ISS path.
///
/// Piece k covers [breakpoints[k], breakpoints[k+1]) (the last piece ends at
/// `horizon`). On piece k, beta is constant and rho(t) = rho_at[k] + (t - t_k) slope[k].
struct IssPath {
  std::vector<double> breakpoints;
  std::vector<Vector> rho_at;
  std::vector<Vector> beta_on_piece;
  std::vector<Vector> slope;
  std::vector<std::vector<std::int8_t>> active_signs;
  std::vector<bool> non_unique;
  bool terminated = false;
  IssStop stop = IssStop::terminated;
  /// Largest t at which the path is known: +inf when terminated.
  double horizon = 0.0;

  std::size_t num_pieces() const noexcept { return breakpoints.size(); }
  bool truncated() const noexcept { return stop == IssStop::max_breakpoints; }
  /// Index of the piece containing t (t clamped below at 0).
  std::size_t piece_at(double t) const;
  double last_breakpoint() const { return breakpoints.back(); }
};

IssPath iss_path(const Problem& problem, const IssOptions& options = {});

struct PathPoint {
  Vector rho;
  Vector beta;
};

/// (rho(t), beta(t)). Throws OutOfRange past the horizon of a non-terminated path.
PathPoint eval_path(const IssPath& path, double t);

/// (1/t) int_0^t beta(s) ds, exact for the piecewise-constant path.
Vector mean_path(const IssPath& path, double t);

/// True iff supports never shrink across pieces up to the piece containing up_to_t.
bool is_incremental(const IssPath& path, double up_to_t);

}  // namespace bregman
