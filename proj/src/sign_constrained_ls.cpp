#include "detail/sign_ls_solver.hpp"

#include <algorithm>
#include <string>

namespace bregman {
namespace detail {

namespace {
constexpr double kKktTol = 1e-10;
constexpr double kRankTol = 1e-10;
}  // namespace

SignLsSolver::SignLsSolver(const Problem& problem)
    : problem_(problem),
      gram_(problem.X().transpose() * problem.X()),
      xty_(problem.X().transpose() * problem.y()) {
  kkt_scale_ = std::max(1.0, xty_.cwiseAbs().maxCoeff());
}

Vector SignLsSolver::correlation(const Vector& beta) const {
  Vector c = xty_;
  for (Index j = 0; j < beta.size(); ++j)
    if (beta[j] != 0.0) c.noalias() -= gram_.col(j) * beta[j];
  return c;
}

Vector SignLsSolver::least_squares_on(const IndexSet& passive, bool& rank_deficient) const {
  const Matrix XP = select_columns(problem_.X(), passive);
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
  cod.setThreshold(kRankTol);
  cod.compute(XP);
  rank_deficient = cod.rank() < XP.cols();
  return cod.solve(problem_.y());
}

SignConstrainedLsResult SignLsSolver::solve(const std::vector<std::int8_t>& signs,
                                            const IndexSet& warm_start) const {
  const Index p = problem_.p();
  const double tol = kKktTol * kkt_scale_;
  const int max_iters = static_cast<int>(10 * p + 10);

  SignConstrainedLsResult out;
  out.beta = Vector::Zero(p);
  out.multipliers = Vector::Zero(p);

  std::vector<char> in_passive(static_cast<std::size_t>(p), 0);
  IndexSet passive;
  for (Index i : warm_start)
    if (i >= 0 && i < p && signs[static_cast<std::size_t>(i)] != 0) passive.push_back(i);
  passive = normalize_index_set(std::move(passive));

  Vector& beta = out.beta;
  bool rank_deficient = false;

  auto feasible_value = [&](Index i, double v) { return signs[static_cast<std::size_t>(i)] * v; };

  // Warm start: shrink the seed set until its least-squares fit is sign feasible.
  while (!passive.empty()) {
    const Vector b = least_squares_on(passive, rank_deficient);
    IndexSet keep;
    for (std::size_t k = 0; k < passive.size(); ++k)
      if (feasible_value(passive[k], b[static_cast<Index>(k)]) > 0.0) keep.push_back(passive[k]);
    if (keep.size() == passive.size()) {
      for (std::size_t k = 0; k < passive.size(); ++k) beta[passive[k]] = b[static_cast<Index>(k)];
      break;
    }
    passive = std::move(keep);
  }
  for (Index i : passive) in_passive[static_cast<std::size_t>(i)] = 1;

  std::vector<char> blocked(static_cast<std::size_t>(p), 0);
  int iter = 0;
  while (true) {
    if (++iter > max_iters)
      throw ConvergenceError("sign-constrained least squares exceeded " +
                                 std::to_string(max_iters) + " iterations",
                             0.0);
    const Vector w = correlation(beta);
    Index enter = -1;
    double best = tol;
    for (Index i = 0; i < p; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      if (signs[ui] == 0 || in_passive[ui] || blocked[ui]) continue;
      const double wi = signs[ui] * w[i];
      if (wi > best) {
        best = wi;
        enter = i;
      }
    }
    if (enter < 0) break;

    passive.insert(std::upper_bound(passive.begin(), passive.end(), enter), enter);
    in_passive[static_cast<std::size_t>(enter)] = 1;

    bool moved = false;
    while (true) {
      const Vector b = least_squares_on(passive, rank_deficient);
      double step = 1.0;
      bool all_positive = true;
      for (std::size_t k = 0; k < passive.size(); ++k) {
        const Index i = passive[k];
        const double bi = feasible_value(i, b[static_cast<Index>(k)]);
        if (bi <= 0.0) {
          all_positive = false;
          const double xi = feasible_value(i, beta[i]);
          const double denom = xi - bi;
          step = std::min(step, denom > 0.0 ? xi / denom : 0.0);
        }
      }
      if (all_positive) {
        for (std::size_t k = 0; k < passive.size(); ++k) beta[passive[k]] = b[static_cast<Index>(k)];
        moved = true;
        break;
      }
      // Move toward b until the first passive coordinate hits zero, then drop it.
      for (std::size_t k = 0; k < passive.size(); ++k) {
        const Index i = passive[k];
        beta[i] += step * (b[static_cast<Index>(k)] - beta[i]);
      }
      if (step > 0.0) moved = true;
      IndexSet keep;
      for (Index i : passive) {
        if (feasible_value(i, beta[i]) <= 1e-15 * std::max(1.0, std::abs(beta[i]))) {
          beta[i] = 0.0;
          in_passive[static_cast<std::size_t>(i)] = 0;
        } else {
          keep.push_back(i);
        }
      }
      passive = std::move(keep);
      if (passive.empty()) break;
      ++iter;
    }
    if (!moved && !in_passive[static_cast<std::size_t>(enter)]) {
      // Degenerate entry: the column cannot be made positive from here.
      blocked[static_cast<std::size_t>(enter)] = 1;
    } else {
      std::fill(blocked.begin(), blocked.end(), 0);
    }
  }

  const Vector w = correlation(beta);
  for (Index i = 0; i < p; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (signs[ui] != 0 && !in_passive[ui]) out.multipliers[i] = -signs[ui] * w[i];
  }
  out.non_unique = !passive.empty() && rank_deficient;

  // The fit is unique but beta need not be once the constrained columns are
  // dependent. Prefer the least-norm point of {X_A b = fit} when it respects the signs.
  IndexSet constrained;
  for (Index i = 0; i < p; ++i)
    if (signs[static_cast<std::size_t>(i)] != 0) constrained.push_back(i);
  if (constrained.size() > 1 && !passive.empty()) {
    const Matrix XA = select_columns(problem_.X(), constrained);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
    cod.setThreshold(kRankTol);
    cod.compute(XA);
    if (cod.rank() < XA.cols()) {
      out.non_unique = true;
      const Vector b = cod.solve(Vector(problem_.X() * beta));
      const double floor = 1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff());
      bool ok = true;
      for (std::size_t k = 0; k < constrained.size(); ++k)
        if (feasible_value(constrained[k], b[static_cast<Index>(k)]) < -floor) ok = false;
      if (ok) {
        for (std::size_t k = 0; k < constrained.size(); ++k) {
          const double v = b[static_cast<Index>(k)];
          beta[constrained[k]] = feasible_value(constrained[k], v) > floor ? v : 0.0;
        }
      }
    }
  }
  out.iterations = iter;
  return out;
}

}  // namespace detail

SignConstrainedLsResult solve_sign_constrained_ls(const Problem& problem, const IndexSet& plus_set,
                                                  const IndexSet& minus_set,
                                                  const IndexSet& warm_start) {
  std::vector<std::int8_t> signs(static_cast<std::size_t>(problem.p()), 0);
  for (Index i : plus_set) {
    if (i < 0 || i >= problem.p()) throw InvalidArgument("plus_set index out of range");
    signs[static_cast<std::size_t>(i)] = 1;
  }
  for (Index i : minus_set) {
    if (i < 0 || i >= problem.p()) throw InvalidArgument("minus_set index out of range");
    if (signs[static_cast<std::size_t>(i)] != 0)
      throw InvalidArgument("plus_set and minus_set must be disjoint");
    signs[static_cast<std::size_t>(i)] = -1;
  }
  return detail::SignLsSolver(problem).solve(signs, warm_start);
}

}  // namespace bregman
