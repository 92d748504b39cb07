#include <bregman/iss.hpp>

#include "detail/sign_ls_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bregman {

namespace {

std::vector<std::int8_t> signs_of(const Vector& beta) {
  std::vector<std::int8_t> s(static_cast<std::size_t>(beta.size()), 0);
  for (Index i = 0; i < beta.size(); ++i) s[static_cast<std::size_t>(i)] = beta[i] > 0 ? 1 : (beta[i] < 0 ? -1 : 0);
  return s;
}

}  // namespace

std::size_t IssPath::piece_at(double t) const {
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
  if (it == breakpoints.begin()) return 0;
  return static_cast<std::size_t>(std::distance(breakpoints.begin(), it) - 1);
}

IssPath iss_path(const Problem& problem, const IssOptions& options) {
  if (!(options.t_max > 0.0)) throw InvalidArgument("iss_path: t_max must be positive");
  if (options.max_breakpoints < 1) throw InvalidArgument("iss_path: max_breakpoints must be >= 1");

  const Index p = problem.p();
  const double n = static_cast<double>(problem.n());
  const detail::SignLsSolver solver(problem);
  const double grad_floor =
      options.grad_tol * std::max(solver.xty().cwiseAbs().maxCoeff() / n, 1e-300);

  IssPath path;
  double t = 0.0;
  Vector rho = Vector::Zero(p);
  Vector beta = Vector::Zero(p);
  bool non_unique = false;

  while (true) {
    Vector g = solver.correlation(beta) / n;
    for (Index i = 0; i < p; ++i)
      if (beta[i] != 0.0 || std::abs(g[i]) <= grad_floor) g[i] = 0.0;

    path.breakpoints.push_back(t);
    path.rho_at.push_back(rho);
    path.beta_on_piece.push_back(beta);
    path.slope.push_back(g);
    path.active_signs.push_back(signs_of(beta));
    path.non_unique.push_back(non_unique);

    // Earliest time at which a zero coordinate's dual reaches +-1.
    double dt = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < p; ++i) {
      if (g[i] == 0.0) continue;
      const double target = g[i] > 0.0 ? 1.0 : -1.0;
      const double gap = target - rho[i];
      if (std::abs(gap) <= options.boundary_tol) continue;
      dt = std::min(dt, gap / g[i]);
    }
    if (!std::isfinite(dt)) {
      path.terminated = true;
      path.stop = IssStop::terminated;
      path.horizon = std::numeric_limits<double>::infinity();
      break;
    }
    const double t_next = t + dt;
    if (t_next > options.t_max) {
      path.stop = IssStop::t_max;
      path.horizon = options.t_max;
      break;
    }
    if (static_cast<Index>(path.breakpoints.size()) >= options.max_breakpoints) {
      path.stop = IssStop::max_breakpoints;
      path.horizon = t_next;
      break;
    }

    rho.noalias() += dt * g;
    std::vector<std::int8_t> constraint(static_cast<std::size_t>(p), 0);
    IndexSet warm;
    for (Index i = 0; i < p; ++i) {
      if (beta[i] != 0.0) rho[i] = beta[i] > 0.0 ? 1.0 : -1.0;
      if (std::abs(rho[i]) >= 1.0 - options.boundary_tol) {
        rho[i] = rho[i] > 0.0 ? 1.0 : -1.0;
        constraint[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(rho[i]);
        warm.push_back(i);
      }
    }
    const SignConstrainedLsResult sub = solver.solve(constraint, warm);
    beta = sub.beta;
    non_unique = sub.non_unique;
    t = t_next;
  }
  return path;
}

PathPoint eval_path(const IssPath& path, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("eval_path: t must be nonnegative");
  if (t > path.horizon)
    throw OutOfRange("eval_path: t = " + std::to_string(t) + " beyond path horizon " +
                     std::to_string(path.horizon));
  const std::size_t k = path.piece_at(t);
  PathPoint out;
  out.rho = path.rho_at[k] + (t - path.breakpoints[k]) * path.slope[k];
  out.beta = path.beta_on_piece[k];
  return out;
}

Vector mean_path(const IssPath& path, double t) {
  if (!(t > 0.0)) throw InvalidArgument("mean_path: t must be positive");
  if (t > path.horizon)
    throw OutOfRange("mean_path: t = " + std::to_string(t) + " beyond path horizon");
  Vector acc = Vector::Zero(path.beta_on_piece.front().size());
  for (std::size_t k = 0; k < path.num_pieces() && path.breakpoints[k] < t; ++k) {
    const double end = k + 1 < path.num_pieces() ? std::min(t, path.breakpoints[k + 1]) : t;
    acc.noalias() += (end - path.breakpoints[k]) * path.beta_on_piece[k];
  }
  return acc / t;
}

bool is_incremental(const IssPath& path, double up_to_t) {
  const std::size_t last = path.piece_at(up_to_t);
  for (std::size_t k = 1; k <= last && k < path.num_pieces(); ++k) {
    const Vector& prev = path.beta_on_piece[k - 1];
    const Vector& cur = path.beta_on_piece[k];
    for (Index i = 0; i < cur.size(); ++i)
      if (prev[i] != 0.0 && cur[i] == 0.0) return false;
  }
  return true;
}

}  // namespace bregman
