#include <bregman/model.hpp>

#include "../support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace bregman;
namespace ts = testing_support;

TEST_CASE("shrink examples") {
  Vector z(1);
  z << 2.0;
  CHECK(shrink(z, 1.0)[0] == 1.0);

  Vector w(2);
  w << -0.5, 0.0;
  CHECK(shrink(w, 1.0).isZero(0.0));

  std::mt19937_64 rng(7);
  const Vector r = ts::gaussian(20, rng);
  CHECK(shrink(r, 0.0) == r);
  CHECK_THROWS_AS(shrink(r, -1.0), InvalidArgument);
}

TEST_CASE("shrink is odd and 1-Lipschitz, also for float") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector a = 3.0 * ts::gaussian(15, rng), b = 3.0 * ts::gaussian(15, rng);
    const double lam = U(rng);
    CHECK((shrink(Vector(-a), lam) + shrink(a, lam)).isZero(0.0));
    const Vector d = (shrink(a, lam) - shrink(b, lam)).cwiseAbs();
    CHECK((d.array() <= (a - b).cwiseAbs().array() + 1e-15).all());
  }
  Eigen::VectorXf f(3);
  f << 2.5f, -0.25f, -4.0f;
  const Eigen::VectorXf g = shrink(f, 1.0f);
  CHECK(g[0] == doctest::Approx(1.5f));
  CHECK(g[1] == 0.0f);
  CHECK(g[2] == doctest::Approx(-3.0f));
}

TEST_CASE("Problem validates input and caches n-normalized norms") {
  std::mt19937_64 rng(3);
  Matrix X = ts::gaussian(12, 4, rng);
  Vector y = ts::gaussian(12, rng);
  const Problem pr(X, y);
  for (Index j = 0; j < 4; ++j)
    CHECK(pr.column_norms_n()[j] == doctest::Approx(X.col(j).norm() / std::sqrt(12.0)).epsilon(1e-12));
  CHECK_THROWS_AS(Problem(X, Vector(y.head(5))), InvalidArgument);
  X(2, 1) = std::nan("");
  CHECK_THROWS_AS(Problem(X, y), InvalidArgument);
  CHECK_THROWS_AS(Problem(Matrix(0, 3), Vector(0)), InvalidArgument);
}

TEST_CASE("oracle estimator") {
  SUBCASE("identity design") {
    Vector y(2);
    y << 3, 1;
    const Vector b = oracle_estimator(Problem(Matrix::Identity(2, 2), y), {0, 1});
    CHECK(b[0] == doctest::Approx(3.0));
    CHECK(b[1] == doctest::Approx(1.0));
  }
  SUBCASE("noiseless recovery") {
    std::mt19937_64 rng(5);
    const Matrix X = ts::gaussian(30, 8, rng);
    Vector beta = Vector::Zero(8);
    beta[1] = 2.0;
    beta[4] = -1.5;
    beta[6] = 0.7;
    const Vector b = oracle_estimator(Problem(X, X * beta), {1, 4, 6});
    CHECK((b - beta).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("matches an independent QR solve") {
    std::mt19937_64 rng(9);
    const Matrix X = ts::gaussian(10, 3, rng);
    Vector beta(3);
    beta << 1, 2, 3;
    const Vector y = X * beta + 0.1 * ts::gaussian(10, rng);
    const Vector b = oracle_estimator(Problem(X, y), {0, 1, 2});
    const Vector ref = ts::qr_least_squares(X, y, {0, 1, 2});
    CHECK((b - ref).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("rank deficiency carries the singular value") {
    std::mt19937_64 rng(2);
    Matrix X = ts::gaussian(10, 3, rng);
    X.col(2) = X.col(0) - X.col(1);
    try {
      oracle_estimator(Problem(X, ts::gaussian(10, rng)), {0, 1, 2});
      FAIL("expected SingularMatrixError");
    } catch (const SingularMatrixError& e) {
      CHECK(e.singular_value() < 1e-10);
    }
  }
}

TEST_CASE("check_conditions on an orthonormal design") {
  std::mt19937_64 rng(4);
  const Index n = 20, p = 6;
  const Matrix Q = ts::gaussian(n, p, rng).householderQr().householderQ() * Matrix::Identity(n, p);
  const Problem pr(std::sqrt(double(n)) * Q, ts::gaussian(n, rng));
  const ConditionReport r = check_conditions(pr, {1, 3});
  CHECK(r.gamma == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.mu < 1e-12);
  CHECK(r.eta == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.cond_number == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(check_conditions(pr, {}), InvalidArgument);
}

TEST_CASE("check_conditions matches a direct evaluation") {
  std::mt19937_64 rng(8);
  const Index n = 40, p = 10;
  const Matrix X = ts::correlated(n, p, 0.3, rng);
  const Problem pr(X, ts::gaussian(n, rng));
  const IndexSet S{0, 2, 5};
  const ConditionReport r = check_conditions(pr, S);
  const Matrix XS = select_columns(X, S), XT = select_columns(X, complement_of(S, p));
  const Matrix GS = XS.transpose() * XS / double(n);
  const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(GS).eigenvalues();
  CHECK(r.gamma == doctest::Approx(ev.minCoeff()).epsilon(1e-12));
  CHECK(r.gamma_max == doctest::Approx(ev.maxCoeff()).epsilon(1e-12));
  const Matrix M = (XT.transpose() * XS / double(n)) * GS.inverse();
  CHECK(r.eta == doctest::Approx(1.0 - M.cwiseAbs().rowwise().sum().maxCoeff()).epsilon(1e-10));
  CHECK(r.gamma <= r.gamma_max);
  CHECK(r.cond_number >= 1.0);
}

TEST_CASE("irrepresentable condition holds on most simulation designs") {
  // x_i ~ N(0, Sigma) with unit diagonal and 1/(3p) off the diagonal, S the first 30.
  const Index n = 80, p = 100;
  const double c = 1.0 / (3.0 * double(p));
  int positive = 0;
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    const Problem pr(ts::correlated(n, p, c, rng), ts::gaussian(n, rng));
    IndexSet S(30);
    for (Index i = 0; i < 30; ++i) S[static_cast<std::size_t>(i)] = i;
    if (check_conditions(pr, S).eta > 0.0) ++positive;
  }
  MESSAGE("eta > 0 in " << positive << " of 100 draws");
  CHECK(positive >= 95);
}

TEST_CASE("coherence bounds") {
  const auto z = coherence_bounds(0.0, 7);
  CHECK(z.gamma == 1.0);
  CHECK(z.eta == 1.0);
  const auto b = coherence_bounds(0.1, 3);
  CHECK(b.gamma == doctest::Approx(0.8));
  CHECK(b.eta == doctest::Approx(0.625));
  const auto edge = coherence_bounds(1.0 / 9.0 - 1e-9, 5);
  CHECK(edge.eta > 0.0);
  CHECK(edge.eta < 1e-7);
  try {
    coherence_bounds(1.0 / 9.0, 5);
    FAIL("expected a violation");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("A3") != std::string::npos);
  }
}

TEST_CASE("A3 implies the coherence-derived gamma and eta") {
  std::mt19937_64 rng(21);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 400, p = 12, s = 2;
    const Problem pr(ts::gaussian(n, p, rng), ts::gaussian(n, rng));
    const double mu = mutual_coherence(pr.X());
    if (!(mu < 1.0 / double(2 * s - 1))) continue;
    // Normalize so the theory's unit column norms hold.
    Matrix Xn = pr.X();
    for (Index j = 0; j < p; ++j) Xn.col(j) *= std::sqrt(double(n)) / Xn.col(j).norm();
    const ConditionReport r = check_conditions(Problem(Xn, pr.y()), {3, 7});
    const auto bnd = coherence_bounds(mu, s);
    CHECK(r.gamma >= bnd.gamma - 1e-9);
    CHECK(r.eta >= bnd.eta - 1e-9);
    CHECK(bnd.gamma > 0.0);
    CHECK(bnd.gamma <= 1.0);
    CHECK(bnd.eta > 0.0);
    CHECK(bnd.eta <= 1.0);
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("tau_bar") {
  CHECK(tau_bar(0.8, 1.0, 100, 100, 1.0) == doctest::Approx(0.4 * std::sqrt(100.0 / std::log(100.0))).epsilon(1e-12));
  CHECK(tau_bar(0.8, 1.0, 100, 100, 1.0) == doctest::Approx(1.8638).epsilon(1e-4));
  CHECK(tau_bar(0.8, 1.0, 100, 100, 1.0, 1e15, 3.0) == doctest::Approx(tau_bar(0.8, 1.0, 100, 100, 1.0)).epsilon(1e-12));
  CHECK(tau_bar(0.4, 1.0, 100, 100, 1.0) == doctest::Approx(0.5 * tau_bar(0.8, 1.0, 100, 100, 1.0)));
  // eta (1 - B/(kappa eta)) = eta - B/kappa
  CHECK(tau_bar(0.8, 1.0, 100, 100, 1.0, 10.0, 2.0) ==
        doctest::Approx((0.8 - 0.2) / 2.0 * std::sqrt(100.0 / std::log(100.0))));
  CHECK_THROWS_AS(tau_bar(0.8, 1.0, 100, 100, 1.0, 1.0, 0.8), InvalidArgument);
  CHECK_THROWS_AS(tau_bar(0.8, 0.0, 100, 100, 1.0), InvalidArgument);
  CHECK_THROWS_AS(tau_bar(0.8, 1.0, 100, 1, 1.0), InvalidArgument);
}

TEST_CASE("lbiss bound B") {
  const Index n = 9;
  const Matrix X = std::sqrt(double(n)) * Matrix::Identity(n, n);
  Vector beta = Vector::Zero(n);
  beta[0] = 1.0;
  const Problem pr(X, X * beta);
  const GroundTruth t0 = GroundTruth::from_beta(beta, 0.0);
  CHECK(lbiss_bound_B(pr, t0, 1.0) == doctest::Approx(1.0 + (X * beta).norm() / double(n)));

  std::mt19937_64 rng(13);
  const Matrix G = ts::gaussian(50, 20, rng);
  Vector b = Vector::Zero(20);
  b.head(4) << 2.0, -1.0, 1.5, 3.0;
  const Problem q(G, G * b + ts::gaussian(50, rng));
  const double gamma = 0.6;
  auto second = [&](double sigma) {
    const double n_ = 50, p_ = 20, s_ = 4;
    return 3.0 + 2.0 * sigma * std::sqrt(std::log(p_) / (gamma * n_)) +
           ((G * b).norm() + 2.0 * sigma * std::sqrt(s_ * std::log(n_))) / (n_ * std::sqrt(gamma));
  };
  const double B1 = lbiss_bound_B(q, GroundTruth::from_beta(b, 1.0), gamma);
  const double B2 = lbiss_bound_B(q, GroundTruth::from_beta(b, 2.0), gamma);
  CHECK(B1 == doctest::Approx(second(1.0)).epsilon(1e-14));
  CHECK(B2 - B1 == doctest::Approx(second(2.0) - second(1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(lbiss_bound_B(q, GroundTruth::from_beta(b, 1.0), 0.0), InvalidArgument);
}

TEST_CASE("GroundTruth derived fields") {
  Vector b(5);
  b << 0, -2, 0, 0.5, 3;
  const GroundTruth t = GroundTruth::from_beta(b, 1.0);
  CHECK(t.support == IndexSet{1, 3, 4});
  CHECK(t.complement() == IndexSet{0, 2});
  CHECK(t.beta_min() == 0.5);
  CHECK(t.beta_max() == 3.0);
}
