#include <bregman/diagnostics.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace bregman {

namespace {

void validate_subgradient(const Vector& beta, const Vector& rho, const char* which) {
  if (beta.size() != rho.size()) throw InvalidArgument(std::string(which) + ": beta/rho length mismatch");
  for (Index i = 0; i < beta.size(); ++i) {
    if (std::abs(rho[i]) > 1.0 + 1e-9)
      throw InvalidArgument(std::string(which) + ": |rho_" + std::to_string(i) + "| exceeds 1");
    if (std::abs(rho[i] * beta[i] - std::abs(beta[i])) > 1e-9 * std::max(1.0, std::abs(beta[i])))
      throw InvalidArgument(std::string(which) + ": rho_" + std::to_string(i) +
                            " is not a subgradient of |beta_i|");
  }
}

Vector sign_vector(const Vector& v) {
  return v.unaryExpr([](double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); });
}

}  // namespace

double bregman_distance(const Vector& beta_ref, const Vector& rho_ref, const Vector& beta,
                        const Vector& rho) {
  if (beta_ref.size() != beta.size()) throw InvalidArgument("bregman_distance: length mismatch");
  validate_subgradient(beta_ref, rho_ref, "bregman_distance(ref)");
  validate_subgradient(beta, rho, "bregman_distance");
  return beta_ref.dot(rho_ref - rho);
}

double potential(const Vector& beta_ref, const Vector& rho_ref, const Vector& beta, const Vector& rho,
                 double kappa) {
  if (!(kappa > 0.0)) throw InvalidArgument("potential: kappa must be positive");
  const double d = bregman_distance(beta_ref, rho_ref, beta, rho);
  if (std::isinf(kappa)) return d;
  return d + (beta - beta_ref).squaredNorm() / (2.0 * kappa);
}

double bihari_F(double x, double kappa, double beta_min_tilde, Index s) {
  if (!(x >= 0.0)) throw InvalidArgument("bihari_F: x must be nonnegative");
  if (!(beta_min_tilde > 0.0) || s < 1) throw InvalidArgument("bihari_F: need beta_min > 0 and s >= 1");
  const double lin = std::isinf(kappa) ? 0.0 : x / (2.0 * kappa);
  const double b2 = beta_min_tilde * beta_min_tilde;
  if (x < b2) return lin;
  if (x <= double(s) * b2) return lin + 2.0 * x / beta_min_tilde;
  return lin + 2.0 * std::sqrt(x * double(s));
}

double bihari_F_inverse(double y, double kappa, double beta_min_tilde, Index s) {
  if (y < 0.0) return 0.0;
  double lo = 0.0;
  double hi = std::max(1.0, beta_min_tilde * beta_min_tilde);
  while (bihari_F(hi, kappa, beta_min_tilde, s) <= y) {
    lo = hi;
    hi *= 2.0;
  }
  // Invariant: F(lo) <= y < F(hi) (or lo = 0).
  while (hi - lo > 1e-12 * std::max(1e-300, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (bihari_F(mid, kappa, beta_min_tilde, s) > y) hi = mid;
    else lo = mid;
  }
  return hi;
}

StoppingTimeBounds stopping_time_bounds(const Vector& beta_tilde, double kappa, double gamma, double C,
                                        Index n, Index p, std::optional<double> alpha,
                                        std::optional<double> opnorm_S) {
  if (!(gamma > 0.0) || !(kappa > 0.0)) throw InvalidArgument("stopping_time_bounds: need gamma, kappa > 0");
  if (!(C > 0.0) || p < 2 || n < 1) throw InvalidArgument("stopping_time_bounds: need C > 0, p >= 2");
  if (alpha.has_value() != opnorm_S.has_value())
    throw InvalidArgument("stopping_time_bounds: alpha and opnorm_S go together");
  double g = gamma;
  if (alpha) {
    g = gamma * (1.0 - kappa * *alpha * *opnorm_S / 2.0);
    if (!(g > 0.0))
      throw InvalidArgument("stopping_time_bounds: kappa*alpha*||X_S X_S*|| >= 2, gamma_tilde <= 0");
  }
  const double s = double((beta_tilde.array() != 0.0).count());
  if (s < 1) throw InvalidArgument("stopping_time_bounds: beta_tilde is zero");
  double bmin = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < beta_tilde.size(); ++i)
    if (beta_tilde[i] != 0.0) bmin = std::min(bmin, std::abs(beta_tilde[i]));
  const double norm = beta_tilde.norm();
  const double inv_kappa = std::isinf(kappa) ? 0.0 : 1.0 / kappa;
  const double logp = std::log(double(p));

  StoppingTimeBounds out;
  out.gamma_tilde = g;
  out.tau1 = (4.0 + 2.0 * std::log(s)) / (g * bmin) + inv_kappa / g * std::log(norm / bmin);
  out.tau2 = 4.0 / (C * g) * std::sqrt(double(n) / logp) +
             inv_kappa / (2.0 * g) * (1.0 + std::log(double(n) * norm * norm / (C * C * s * logp)));
  if (alpha) {
    out.tau1 += 3.0 * *alpha;
    out.tau2 += 2.0 * *alpha;
  }
  return out;
}

ResidualDecomposition residual_decomposition(const Problem& problem, const IndexSet& support,
                                             const Vector& beta, const std::optional<Vector>& epsilon_known) {
  if (beta.size() != problem.p()) throw InvalidArgument("residual_decomposition: beta has wrong length");
  const IndexSet S = normalize_index_set(support);
  for (Index i = 0; i < beta.size(); ++i)
    if (beta[i] != 0.0 && !std::binary_search(S.begin(), S.end(), i))
      throw InvalidArgument("residual_decomposition: beta is not supported on S");
  const Vector oracle = oracle_estimator(problem, S);
  const Matrix XS = select_columns(problem.X(), S);
  const Vector fit_gap = XS * select_entries(Vector(oracle - beta), S);
  const Vector orth = problem.y() - XS * select_entries(oracle, S);

  ResidualDecomposition out;
  out.signal_norm = fit_gap.norm();
  out.noise_norm = orth.norm();
  out.total = std::hypot(out.signal_norm, out.noise_norm);
  if (epsilon_known) {
    if (epsilon_known->size() != problem.n()) throw InvalidArgument("residual_decomposition: epsilon has wrong length");
    const Vector coef = XS.colPivHouseholderQr().solve(*epsilon_known);
    out.noise_from_epsilon = (*epsilon_known - XS * coef).norm();
  }
  return out;
}

double residual_rule_threshold(double sigma, Index n) {
  const double nn = double(n);
  return sigma * std::sqrt(nn + 2.0 * std::sqrt(nn * std::log(nn)));
}

bool stop_rule_residual(const Vector& residual, double sigma, Index n) {
  if (!(sigma > 0.0)) throw InvalidArgument("stop_rule_residual: sigma must be positive");
  return residual.norm() <= residual_rule_threshold(sigma, n);
}

double gradient_rule_threshold(const Problem& problem, double sigma, double factor) {
  const double max_col = problem.X().colwise().norm().maxCoeff();
  return factor * 2.0 * sigma * std::sqrt(max_col * std::log(double(problem.p())));
}

bool stop_rule_gradient(const Problem& problem, const Vector& residual, double sigma, double factor) {
  if (!(sigma > 0.0)) throw InvalidArgument("stop_rule_gradient: sigma must be positive");
  if (residual.size() != problem.n()) throw InvalidArgument("stop_rule_gradient: residual has wrong length");
  return (problem.X().transpose() * residual).cwiseAbs().maxCoeff() <=
         gradient_rule_threshold(problem, sigma, factor);
}

double strong_signal_threshold(const ConditionReport& report, double sigma, Index n, Index p,
                               double max_colnorm_T) {
  if (!(report.gamma > 0.0)) throw InvalidArgument("strong_signal_threshold: gamma must be positive");
  const double s = double(std::max<Index>(report.s, 1));
  const double a = 4.0 * sigma / std::sqrt(report.gamma);
  const double b = 8.0 * sigma * (2.0 + std::log(s)) * max_colnorm_T / (report.gamma * report.eta);
  return std::max(a, b) * std::sqrt(std::log(double(p)) / double(n));
}

bool strong_signal_check(const ConditionReport& report, const GroundTruth& truth, Index n, Index p,
                         double max_colnorm_T) {
  if (truth.sigma == 0.0) return true;
  if (!(report.eta > 0.0)) return false;
  return truth.beta_min() >= strong_signal_threshold(report, truth.sigma, n, p, max_colnorm_T);
}

double residual_rule_signal_threshold(double gamma, double sigma, Index n, Index s) {
  const double nn = double(n);
  return 2.0 * sigma / std::sqrt(gamma) *
         (std::sqrt(1.0 + 2.0 * std::sqrt(std::log(nn) / nn)) + std::sqrt(std::log(double(s)) / nn));
}

PotentialTrace potential_trace(const LbTrace& trace, const Problem& restricted, const Vector& beta_tilde) {
  if (beta_tilde.size() != restricted.p()) throw InvalidArgument("potential_trace: beta_tilde has wrong length");
  const Vector rho_ref = sign_vector(beta_tilde);
  PotentialTrace out;
  for (const LbRecord& r : trace.records) {
    const Vector rho = r.z - r.beta / trace.kappa;
    const double d = bregman_distance(beta_tilde, rho_ref, r.beta, rho);
    out.times.push_back(r.t);
    out.distance.push_back(d);
    out.psi.push_back(d + (r.beta - beta_tilde).squaredNorm() / (2.0 * trace.kappa));
    out.fit_error.push_back((restricted.X() * (r.beta - beta_tilde)).norm());
  }
  return out;
}

BihariCheck verify_discrete_bihari(const LbTrace& trace, const Problem& restricted,
                                   const Vector& beta_tilde, double gamma, double kappa, double alpha,
                                   double opnorm_S) {
  for (std::size_t k = 1; k < trace.records.size(); ++k)
    if (trace.records[k].k != trace.records[k - 1].k + 1)
      throw InvalidArgument("verify_discrete_bihari: trace must hold every iterate (record_stride = 1)");
  double bmin = std::numeric_limits<double>::infinity();
  Index s = 0;
  for (Index i = 0; i < beta_tilde.size(); ++i)
    if (beta_tilde[i] != 0.0) {
      bmin = std::min(bmin, std::abs(beta_tilde[i]));
      ++s;
    }
  if (s == 0) throw InvalidArgument("verify_discrete_bihari: beta_tilde is zero");
  BihariCheck out;
  out.gamma_tilde = gamma * (1.0 - kappa * alpha * opnorm_S / 2.0);
  if (!(out.gamma_tilde > 0.0)) throw InvalidArgument("verify_discrete_bihari: gamma_tilde <= 0");
  const PotentialTrace pt = potential_trace(trace, restricted, beta_tilde);
  out.holds = true;
  out.worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < pt.psi.size(); ++k) {
    const double bound = -alpha * out.gamma_tilde * bihari_F_inverse(pt.psi[k], kappa, bmin, s) + 1e-9;
    const double slack = bound - (pt.psi[k + 1] - pt.psi[k]);
    out.worst_slack = std::min(out.worst_slack, slack);
    if (slack < 0.0) out.holds = false;
  }
  return out;
}

}  // namespace bregman
