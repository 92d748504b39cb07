#include <bregman/model.hpp>

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace bregman {

IndexSet normalize_index_set(IndexSet set) {
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  return set;
}

IndexSet support_of(const Vector& v) {
  IndexSet out;
  for (Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) out.push_back(i);
  return out;
}

IndexSet complement_of(const IndexSet& set, Index p) {
  IndexSet out;
  out.reserve(static_cast<std::size_t>(p));
  auto it = set.begin();
  for (Index i = 0; i < p; ++i) {
    while (it != set.end() && *it < i) ++it;
    if (it == set.end() || *it != i) out.push_back(i);
  }
  return out;
}

Matrix select_columns(const Matrix& X, const IndexSet& cols) {
  Matrix out(X.rows(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k)) = X.col(cols[k]);
  return out;
}

Vector select_entries(const Vector& v, const IndexSet& idx) {
  Vector out(static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out[static_cast<Index>(k)] = v[idx[k]];
  return out;
}

namespace {

void check_index_set(const IndexSet& set, Index p, const char* who) {
  for (std::size_t k = 0; k < set.size(); ++k) {
    if (set[k] < 0 || set[k] >= p)
      throw InvalidArgument(std::string(who) + ": index " + std::to_string(set[k]) +
                            " out of range [0, " + std::to_string(p) + ")");
    if (k > 0 && set[k] <= set[k - 1])
      throw InvalidArgument(std::string(who) + ": index set must be sorted and unique");
  }
}

}  // namespace

Problem::Problem(Matrix X, Vector y) : X_(std::move(X)), y_(std::move(y)) {
  if (X_.rows() < 1 || X_.cols() < 1) throw InvalidArgument("Problem: X must be at least 1x1");
  if (y_.size() != X_.rows())
    throw InvalidArgument("Problem: y has " + std::to_string(y_.size()) + " entries but X has " +
                          std::to_string(X_.rows()) + " rows");
  if (!X_.allFinite() || !y_.allFinite())
    throw InvalidArgument("Problem: X and y must be finite");
  column_norms_n_ = X_.colwise().norm().transpose() / std::sqrt(static_cast<double>(n()));
}

Problem Problem::restricted(const IndexSet& cols) const {
  check_index_set(cols, p(), "Problem::restricted");
  return Problem(select_columns(X_, cols), y_);
}

GroundTruth GroundTruth::from_beta(Vector beta_star, double sigma) {
  if (!(sigma >= 0.0)) throw InvalidArgument("GroundTruth: sigma must be nonnegative");
  GroundTruth t;
  t.support = support_of(beta_star);
  t.beta_star = std::move(beta_star);
  t.sigma = sigma;
  return t;
}

double GroundTruth::beta_min() const {
  double m = std::numeric_limits<double>::infinity();
  for (Index i : support) m = std::min(m, std::abs(beta_star[i]));
  return support.empty() ? 0.0 : m;
}

double GroundTruth::beta_max() const {
  double m = 0.0;
  for (Index i : support) m = std::max(m, std::abs(beta_star[i]));
  return m;
}

Vector checked_singular_values(const Problem& problem, const IndexSet& support) {
  check_index_set(support, problem.p(), "checked_singular_values");
  if (support.empty()) return Vector();
  const Matrix XS = select_columns(problem.X(), support) / std::sqrt(double(problem.n()));
  Eigen::JacobiSVD<Matrix> svd(XS);
  Vector sv = svd.singularValues();
  if (static_cast<Index>(support.size()) > problem.n())
    throw SingularMatrixError("X_S has more columns than rows", 0.0);
  const double smallest = sv[sv.size() - 1];
  if (!(smallest > 1e-10 * sv[0]))
    throw SingularMatrixError("X_S is rank deficient: smallest singular value " +
                                  std::to_string(smallest),
                              smallest);
  return sv;
}

Vector oracle_estimator(const Problem& problem, const IndexSet& support) {
  Vector beta = Vector::Zero(problem.p());
  if (support.empty()) return beta;
  checked_singular_values(problem, support);
  const Matrix XS = select_columns(problem.X(), support);
  const Vector bS = XS.colPivHouseholderQr().solve(problem.y());
  for (std::size_t k = 0; k < support.size(); ++k) beta[support[k]] = bS[static_cast<Index>(k)];
  return beta;
}

double mutual_coherence(const Matrix& X) {
  const double n = static_cast<double>(X.rows());
  Matrix Xn = X;
  for (Index j = 0; j < Xn.cols(); ++j) {
    const double norm_n = Xn.col(j).norm() / std::sqrt(n);
    if (norm_n > 0.0) Xn.col(j) /= norm_n;
  }
  const Matrix G = (Xn.transpose() * Xn) / n;
  double mu = 0.0;
  for (Index j = 0; j < G.cols(); ++j)
    for (Index i = 0; i < j; ++i) mu = std::max(mu, std::abs(G(i, j)));
  return mu;
}

double max_column_norm_n(const Problem& problem, const IndexSet& cols) {
  double m = 0.0;
  for (Index j : cols) m = std::max(m, problem.column_norms_n()[j]);
  return m;
}

ConditionReport check_conditions(const Problem& problem, const IndexSet& support,
                                 std::optional<double> sigma) {
  if (support.empty()) throw InvalidArgument("check_conditions: support must be nonempty");
  checked_singular_values(problem, support);

  const double n = static_cast<double>(problem.n());
  const IndexSet T = complement_of(support, problem.p());
  const Matrix XS = select_columns(problem.X(), support);
  const Matrix gram_S = (XS.transpose() * XS) / n;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram_S, Eigen::EigenvaluesOnly);
  ConditionReport r;
  r.s = static_cast<Index>(support.size());
  r.gamma = eig.eigenvalues()[0];
  r.gamma_max = eig.eigenvalues()[eig.eigenvalues().size() - 1];
  if (!(r.gamma > 0.0)) throw SingularMatrixError("X_S^* X_S is singular", r.gamma);
  r.cond_number = r.gamma_max / r.gamma;

  if (T.empty()) {
    r.eta = 1.0;
  } else {
    const Matrix XT = select_columns(problem.X(), T);
    // rows of X_T^* X_S (X_S^* X_S)^{-1}
    const Matrix cross = (XT.transpose() * XS) / n;
    const Matrix irrep = gram_S.ldlt().solve(cross.transpose()).transpose();
    r.eta = 1.0 - irrep.cwiseAbs().rowwise().sum().maxCoeff();
  }
  r.mu = mutual_coherence(problem.X());
  r.max_colnorm_T = max_column_norm_n(problem, T);
  if (sigma && *sigma > 0.0 && problem.p() >= 2 && r.max_colnorm_T > 0.0)
    r.tau_bar = tau_bar(std::max(r.eta, 0.0), *sigma, problem.n(), problem.p(), r.max_colnorm_T);
  return r;
}

CoherenceBounds coherence_bounds(double mu, Index s) {
  if (s < 1) throw InvalidArgument("coherence_bounds: s must be positive");
  if (!(mu >= 0.0)) throw InvalidArgument("coherence_bounds: mu must be nonnegative");
  const double limit = 1.0 / static_cast<double>(2 * s - 1);
  if (!(mu < limit))
    throw InvalidArgument("coherence_bounds: mutual incoherence (A3) requires mu < 1/(2s-1) = " +
                          std::to_string(limit));
  const double sm1 = static_cast<double>(s - 1);
  const double gamma = 1.0 - mu * sm1;
  const double eta = (1.0 - mu * static_cast<double>(2 * s - 1)) / gamma;
  return {gamma, eta};
}

double tau_bar(double eta, double sigma, Index n, Index p, double max_colnorm_T,
               std::optional<double> kappa, std::optional<double> B) {
  if (!(sigma > 0.0)) throw InvalidArgument("tau_bar: sigma must be positive");
  if (p < 2) throw InvalidArgument("tau_bar: p must be at least 2 so that log p > 0");
  if (!(max_colnorm_T > 0.0)) throw InvalidArgument("tau_bar: max_colnorm_T must be positive");
  double eff_eta = eta;
  if (kappa && B) {
    if (!(*B < *kappa * eta))
      throw InvalidArgument("tau_bar: kappa too small, need B < kappa * eta (B = " +
                            std::to_string(*B) + ", kappa * eta = " +
                            std::to_string(*kappa * eta) + ")");
    eff_eta = (1.0 - *B / (*kappa * eta)) * eta;
  }
  return eff_eta / (2.0 * sigma) * std::sqrt(double(n) / std::log(double(p))) / max_colnorm_T;
}

double lbiss_bound_B(const Problem& problem, const GroundTruth& truth, double gamma) {
  if (!(gamma > 0.0)) throw InvalidArgument("lbiss_bound_B: gamma must be positive");
  if (truth.p() != problem.p()) throw InvalidArgument("lbiss_bound_B: dimension mismatch");
  const double n = static_cast<double>(problem.n());
  const double p = static_cast<double>(problem.p());
  const double s = static_cast<double>(truth.s());
  const double sigma = truth.sigma;
  const double fit_norm = (problem.X() * truth.beta_star).norm();
  return truth.beta_max() + 2.0 * sigma * std::sqrt(std::log(p) / (gamma * n)) +
         (fit_norm + 2.0 * sigma * std::sqrt(s * std::log(n))) / (n * std::sqrt(gamma));
}

}  // namespace bregman
