#include <bregman/iss.hpp>
#include <bregman/lasso.hpp>

#include "../support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace bregman;
namespace ts = testing_support;

namespace {

Problem scalar_problem() { return Problem(Matrix::Ones(1, 1), Vector::Constant(1, 2.0)); }

Problem seeded(Index n, Index p, Index s, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Matrix X = ts::gaussian(n, p, rng);
  Vector beta = Vector::Zero(p);
  for (Index j = 0; j < s; ++j) beta[j] = (j % 2 ? -1.0 : 1.0) * (1.0 + 0.5 * double(j));
  return Problem(X, X * beta + sigma * ts::gaussian(n, rng));
}

// Independent KKT check written from the optimality conditions.
double kkt_ref(const Problem& pr, const Vector& b, double lambda) {
  const Vector g = pr.X().transpose() * (pr.y() - pr.X() * b) / double(pr.n());
  double worst = 0.0;
  for (Index i = 0; i < b.size(); ++i) {
    if (b[i] != 0.0) worst = std::max(worst, std::abs(g[i] - lambda * (b[i] > 0 ? 1.0 : -1.0)));
    else worst = std::max(worst, std::abs(g[i]) - lambda);
  }
  return worst;
}

}  // namespace

TEST_CASE("scalar lasso") {
  const Problem pr = scalar_problem();
  CHECK(lasso_solve(pr, 1.0)[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lasso_solve(pr, 0.5)[0] == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(lasso_solve(pr, 2.0)[0] == 0.0);
  CHECK(lasso_solve(pr, 3.0)[0] == 0.0);
  CHECK(lasso_lambda_max(pr) == 2.0);
  CHECK_THROWS_AS(lasso_solve(pr, 0.0), InvalidArgument);
  CHECK_THROWS_AS(lasso_solve(pr, -1.0), InvalidArgument);
}

TEST_CASE("zero above lambda_max") {
  const Problem pr = seeded(30, 12, 3, 0.5, 4);
  const double lm = lasso_lambda_max(pr);
  CHECK(lm == doctest::Approx((pr.X().transpose() * pr.y()).cwiseAbs().maxCoeff() / 30.0));
  CHECK(lasso_solve(pr, lm).isZero(0.0));
  CHECK(lasso_solve(pr, 1.5 * lm).isZero(0.0));
  CHECK_FALSE(lasso_solve(pr, 0.99 * lm).isZero(0.0));
}

TEST_CASE("matches an independent proximal-gradient solver") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Problem pr = seeded(12, 5, 2, 0.3, 70 + seed);
    const Vector b = lasso_solve(pr, 0.3);
    const Vector ref = ts::prox_gradient_lasso(pr.X(), pr.y(), 0.3);
    const double fa = ts::lasso_objective(pr.X(), pr.y(), 0.3, b);
    const double fb = ts::lasso_objective(pr.X(), pr.y(), 0.3, ref);
    CHECK(std::abs(fa - fb) <= 1e-9);
    CHECK(kkt_ref(pr, b, 0.3) <= 1e-8);
    CHECK(kkt_residual(pr, b, 0.3) == doctest::Approx(std::max(0.0, kkt_ref(pr, b, 0.3))).epsilon(1e-6));
  }
}

TEST_CASE("warm start gives the same answer") {
  const Problem pr = seeded(40, 20, 4, 0.5, 8);
  const Vector cold = lasso_solve(pr, 0.1);
  const Vector warm = lasso_solve(pr, 0.1, Vector(cold + 0.3 * Vector::Ones(20)));
  CHECK((cold - warm).cwiseAbs().maxCoeff() < 1e-8);
  CHECK_THROWS_AS(lasso_solve(pr, 0.1, Vector(Vector::Zero(3))), InvalidArgument);
}

TEST_CASE("grids") {
  const Problem pr = scalar_problem();
  const auto g = lasso_grid(pr, LassoGrid{});
  REQUIRE(g.size() == 100);
  CHECK(g.front() == 2.0);
  CHECK(g.back() == doctest::Approx(2e-3));
  for (std::size_t k = 1; k < g.size(); ++k) CHECK(g[k] < g[k - 1]);
  CHECK(g[1] / g[0] == doctest::Approx(g[50] / g[49]));

  LassoGrid lin;
  lin.lambda_max = 1.0;
  lin.lambda_min = 0.1;
  lin.count = 10;
  lin.geometric = false;
  const auto l = lasso_grid(pr, lin);
  CHECK(l[1] - l[0] == doctest::Approx(-0.1));
  lin.lambda_min = 2.0;
  CHECK_THROWS_AS(lasso_grid(pr, lin), InvalidArgument);

  // lambda = 1/t for the scalar closed form
  std::vector<double> lams;
  for (double t : {0.5, 0.75, 1.0, 2.0, 3.0}) lams.push_back(1.0 / t);
  const LassoPath path = lasso_path(pr, lams);
  for (std::size_t k = 0; k < lams.size(); ++k) {
    const double t = 1.0 / lams[k];
    CHECK(path.solutions[k][0] == doctest::Approx(t < 0.5 ? 0.0 : 2.0 - 1.0 / t).epsilon(1e-12));
  }
  CHECK_THROWS_AS(lasso_path(pr, std::vector<double>{0.5, 1.0}), InvalidArgument);
}

TEST_CASE("simulation-size paths are KKT certified") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Problem pr = seeded(80, 100, 30, 1.0, 300 + seed);
    LassoGrid g;
    g.count = 60;
    const LassoPath path = lasso_path(pr, g);
    CHECK(path.solutions.front().isZero(0.0));
    for (std::size_t k = 0; k < path.solutions.size(); ++k) {
      CHECK(path.kkt_residuals[k] <= 1e-8);
      CHECK(kkt_ref(pr, path.solutions[k], path.lambda_grid[k]) <= 1e-8);
    }
  }
}

TEST_CASE("bias decomposition") {
  const Problem pr = scalar_problem();
  const Vector b = lasso_solve(pr, 1.0);
  const BiasDecomposition d = lasso_bias_decomposition(pr, b, 1.0, {0});
  CHECK(d.oracle_part[0] == doctest::Approx(2.0));
  CHECK(d.bias_part[0] == doctest::Approx(1.0));

  const Problem q = seeded(50, 10, 3, 0.2, 12);
  for (double lam : {0.2, 0.05, 1e-6}) {
    const Vector bh = lasso_solve(q, lam);
    const IndexSet S = support_of(bh);
    const BiasDecomposition e = lasso_bias_decomposition(q, bh, lam, S);
    const Vector bs = select_entries(bh, S);
    CHECK((e.oracle_part - e.bias_part - bs).cwiseAbs().maxCoeff() <= 1e-8);
    if (lam < 1e-5) CHECK(e.bias_part.cwiseAbs().maxCoeff() < 1e-4);
  }
  CHECK_THROWS_AS(lasso_bias_decomposition(q, Vector::Zero(10), 0.1, {0, 3}), InvalidArgument);
}

TEST_CASE("mean path equals lasso on incremental paths") {
  int used = 0;
  for (std::uint64_t seed = 0; seed < 40 && used < 10; ++seed) {
    const Problem pr = seeded(40, 30, 4, 0.5, 800 + seed);
    const IssPath path = iss_path(pr);
    // stop at the first piece whose support leaves S
    std::size_t k = 1;
    while (k < path.num_pieces()) {
      bool in_S = true;
      for (Index i = 4; i < 30; ++i)
        if (path.beta_on_piece[k][i] != 0.0) in_S = false;
      if (!in_S) break;
      ++k;
    }
    if (k < 3 || k == path.num_pieces()) continue;
    const double t_end = path.breakpoints[k];
    if (!is_incremental(path, t_end * (1 - 1e-12))) continue;
    ++used;
    for (int j = 1; j <= 10; ++j) {
      const double t = path.breakpoints[1] * 0.9 + (t_end - path.breakpoints[1] * 0.9) * j / 10.0;
      const Vector m = mean_path(path, t);
      const Vector l = lasso_solve(pr, 1.0 / t);
      CHECK((m - l).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
  CHECK(used >= 5);
}
