#include <bregman/diagnostics.hpp>
#include <bregman/experiments.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <thread>

namespace bregman {

void ExperimentConfig::validate() const {
  if (n < 1 || p < 1) throw InvalidArgument("config: n and p must be >= 1");
  if (s < 0 || s > p) throw InvalidArgument("config: need 0 <= s <= p");
  if (!(sigma >= 0.0)) throw InvalidArgument("config: sigma must be nonnegative");
  if (reps < 1) throw InvalidArgument("config: reps must be >= 1");
  if (!(kappa_alpha > 0.0)) throw InvalidArgument("config: kappa_alpha must be positive");
  for (double k : kappa_list)
    if (!(k > 0.0)) throw InvalidArgument("config: kappa values must be positive");
  if (covariance == Covariance::constant_offdiag) {
    const double c = offdiag_value();
    // Sigma = (1 - c) I + c 11^T is positive definite iff -1/(p-1) < c < 1.
    if (!(c < 1.0) || (p > 1 && !(c > -1.0 / double(p - 1))))
      throw InvalidArgument("config: covariance with off-diagonal " + std::to_string(c) + " is not positive definite");
  }
  if (lasso_grid_count < 2) throw InvalidArgument("config: lasso_grid_count must be >= 2");
  if (!(lb_horizon_factor > 0.0) || lb_max_iters < 1) throw InvalidArgument("config: bad LB horizon");
}

std::mt19937_64 rng_stream(std::uint64_t seed, std::uint64_t rep) {
  // splitmix64 over (seed, rep) so streams do not depend on rep order.
  auto mix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  std::seed_seq seq{mix(seed), mix(seed ^ mix(rep + 1))};
  return std::mt19937_64(seq);
}

Instance generate_instance(const ExperimentConfig& config, std::mt19937_64& rng) {
  config.validate();
  const Index n = config.n, p = config.p;
  std::normal_distribution<double> normal(0.0, 1.0);

  Matrix G(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) G(i, j) = normal(rng);
  Matrix X;
  if (config.covariance == Covariance::identity) {
    X = std::move(G);
  } else {
    const double c = config.offdiag_value();
    Matrix sigma = Matrix::Constant(p, p, c);
    sigma.diagonal().setOnes();
    const Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success) throw InvalidArgument("generate_instance: covariance not positive definite");
    // x_i = L g_i, i.e. X = G L^T.
    X = G * llt.matrixL().transpose();
  }

  Vector beta = Vector::Zero(p);
  for (Index j = 0; j < config.s; ++j) {
    const double r = normal(rng);
    beta[j] = r + (r > 0 ? 1.0 : (r < 0 ? -1.0 : 0.0));
  }
  Vector eps(n);
  for (Index i = 0; i < n; ++i) eps[i] = config.sigma * normal(rng);
  Vector y = X * beta + eps;
  return Instance{Problem(std::move(X), std::move(y)), GroundTruth::from_beta(beta, config.sigma), eps};
}

Instance generate_instance(const ExperimentConfig& config, Index rep) {
  auto rng = rng_stream(config.seed, static_cast<std::uint64_t>(rep));
  return generate_instance(config, rng);
}

namespace {

std::vector<SelectionEvent> sorted(std::vector<SelectionEvent> ev) {
  std::stable_sort(ev.begin(), ev.end(), [](const SelectionEvent& a, const SelectionEvent& b) {
    return a.time < b.time || (a.time == b.time && a.coordinate < b.coordinate);
  });
  return ev;
}

}  // namespace

std::vector<SelectionEvent> selection_order(const IssPath& path) {
  const Index p = path.beta_on_piece.empty() ? 0 : path.beta_on_piece.front().size();
  std::vector<SelectionEvent> ev;
  std::vector<char> seen(static_cast<std::size_t>(p), 0);
  for (std::size_t k = 0; k < path.num_pieces(); ++k)
    for (Index i = 0; i < p; ++i)
      if (!seen[static_cast<std::size_t>(i)] && path.beta_on_piece[k][i] != 0.0) {
        seen[static_cast<std::size_t>(i)] = 1;
        ev.push_back({i, path.breakpoints[k]});
      }
  return sorted(std::move(ev));
}

std::vector<SelectionEvent> selection_order(const LbTrace& trace) {
  std::vector<SelectionEvent> ev;
  for (std::size_t i = 0; i < trace.first_entry.size(); ++i)
    if (trace.first_entry[i] >= 0)
      ev.push_back({static_cast<Index>(i), double(trace.first_entry[i]) * trace.alpha});
  return sorted(std::move(ev));
}

std::vector<SelectionEvent> selection_order(const LassoPath& path) {
  std::vector<SelectionEvent> ev;
  if (path.solutions.empty()) return ev;
  const Index p = path.solutions.front().size();
  std::vector<char> seen(static_cast<std::size_t>(p), 0);
  for (std::size_t k = 0; k < path.solutions.size(); ++k)
    for (Index i = 0; i < p; ++i)
      if (!seen[static_cast<std::size_t>(i)] && path.solutions[k][i] != 0.0) {
        seen[static_cast<std::size_t>(i)] = 1;
        ev.push_back({i, 1.0 / path.lambda_grid[k]});
      }
  return sorted(std::move(ev));
}

RocResult roc_auc(const std::vector<SelectionEvent>& order, const GroundTruth& truth) {
  const Index p = truth.p();
  const Index s = truth.s();
  const Index t = p - s;
  if (s == 0 || t == 0) throw InvalidArgument("roc_auc: need both true and false coordinates");
  std::vector<char> in_S(static_cast<std::size_t>(p), 0);
  for (Index i : truth.support) in_S[static_cast<std::size_t>(i)] = 1;

  RocResult out;
  out.events = order;
  std::vector<char> seen(static_cast<std::size_t>(p), 0);
  // Groups of (true count, false count), one per ROC step.
  std::vector<std::pair<Index, Index>> steps;
  for (std::size_t k = 0; k < order.size();) {
    std::size_t j = k;
    Index tp = 0, fp = 0;
    while (j < order.size() && order[j].time == order[k].time) {
      const Index c = order[j].coordinate;
      if (c < 0 || c >= p) throw InvalidArgument("roc_auc: coordinate out of range");
      if (!seen[static_cast<std::size_t>(c)]) {
        seen[static_cast<std::size_t>(c)] = 1;
        (in_S[static_cast<std::size_t>(c)] ? tp : fp)++;
      }
      ++j;
    }
    steps.emplace_back(tp, fp);
    k = j;
  }
  for (Index i = 0; i < p; ++i)
    if (!seen[static_cast<std::size_t>(i)]) steps.emplace_back(in_S[static_cast<std::size_t>(i)] ? 1 : 0,
                                                               in_S[static_cast<std::size_t>(i)] ? 0 : 1);

  Index tp = 0, fp = 0;
  out.fpr.push_back(0.0);
  out.tpr.push_back(0.0);
  for (const auto& [dt, df] : steps) {
    tp += dt;
    fp += df;
    const double x = double(fp) / double(t), y = double(tp) / double(s);
    out.auc += 0.5 * (x - out.fpr.back()) * (y + out.tpr.back());
    out.fpr.push_back(x);
    out.tpr.push_back(y);
  }
  return out;
}

unsigned study_threads(const ExperimentConfig& config) {
  if (config.threads > 0) return config.threads;
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ISS_SPARSE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
  }
  return hw;
}

namespace {

struct RepOutcome {
  std::vector<double> auc;  // iss, lasso, lb per kappa; NaN on failure
  std::string diagnostic;
};

RepOutcome run_rep(const ExperimentConfig& config, Index rep) {
  const std::size_t m = 2 + config.kappa_list.size();
  RepOutcome out{std::vector<double>(m, std::nan("")), {}};
  try {
    const Instance inst = generate_instance(config, rep);
    const IssPath path = iss_path(inst.problem);
    out.auc[0] = roc_auc(selection_order(path), inst.truth).auc;

    LassoGrid grid;
    grid.count = config.lasso_grid_count;
    out.auc[1] = roc_auc(selection_order(lasso_path(inst.problem, grid)), inst.truth).auc;

    const double horizon = config.lb_horizon_factor * path.last_breakpoint();
    for (std::size_t k = 0; k < config.kappa_list.size(); ++k) {
      const double kappa = config.kappa_list[k];
      const double alpha = config.kappa_alpha / kappa;
      LbOptions opt;
      opt.max_iters = std::min<Index>(config.lb_max_iters, static_cast<Index>(std::ceil(horizon / alpha)));
      opt.record_stride = opt.max_iters + 1;
      opt.gram_form = true;
      const LbTrace trace = lb_run(inst.problem, kappa, alpha, opt);
      out.auc[2 + k] = roc_auc(selection_order(trace), inst.truth).auc;
    }
  } catch (const Error& e) {
    out.diagnostic = "rep " + std::to_string(rep) + ": " + e.what();
  }
  return out;
}

}  // namespace

AucStudy run_auc_study(const ExperimentConfig& config) {
  config.validate();
  const auto reps = static_cast<std::size_t>(config.reps);
  std::vector<RepOutcome> outcomes(reps);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t r = next++; r < reps; r = next++) outcomes[r] = run_rep(config, static_cast<Index>(r));
  };
  const unsigned threads = std::min<unsigned>(study_threads(config), static_cast<unsigned>(reps));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(work);
    work();
  }

  AucStudy study;
  study.sigma = config.sigma;
  std::vector<std::pair<std::string, double>> methods{{"iss", 0.0}, {"lasso", 0.0}};
  for (double k : config.kappa_list) methods.emplace_back("lb", k);
  study.summary.resize(methods.size());
  for (std::size_t m = 0; m < methods.size(); ++m) {
    study.summary[m].method = methods[m].first;
    study.summary[m].kappa = methods[m].second;
  }
  for (std::size_t r = 0; r < reps; ++r) {
    if (!outcomes[r].diagnostic.empty()) study.diagnostics.push_back(outcomes[r].diagnostic);
    for (std::size_t m = 0; m < methods.size(); ++m) {
      const double a = outcomes[r].auc[m];
      if (std::isnan(a)) {
        ++study.summary[m].failed;
        continue;
      }
      study.rows.push_back({methods[m].first, methods[m].second, config.sigma, static_cast<Index>(r), a});
    }
  }
  // Two-pass mean / sample std, accumulated in ascending rep order.
  for (std::size_t m = 0; m < methods.size(); ++m) {
    MethodSummary& sm = study.summary[m];
    double sum = 0.0;
    for (std::size_t r = 0; r < reps; ++r)
      if (!std::isnan(outcomes[r].auc[m])) {
        sum += outcomes[r].auc[m];
        ++sm.reps;
      }
    if (sm.reps == 0) continue;
    sm.mean_auc = sum / double(sm.reps);
    double ss = 0.0;
    for (std::size_t r = 0; r < reps; ++r)
      if (!std::isnan(outcomes[r].auc[m])) ss += (outcomes[r].auc[m] - sm.mean_auc) * (outcomes[r].auc[m] - sm.mean_auc);
    sm.std_auc = sm.reps > 1 ? std::sqrt(ss / double(sm.reps - 1)) : 0.0;
  }
  return study;
}

namespace {

bool same_signs(const Vector& beta, const Vector& truth) {
  for (Index i = 0; i < beta.size(); ++i) {
    const int a = beta[i] > 0 ? 1 : (beta[i] < 0 ? -1 : 0);
    const int b = truth[i] > 0 ? 1 : (truth[i] < 0 ? -1 : 0);
    if (a != b) return false;
  }
  return true;
}

// First ISS piece whose residual satisfies the rule, or npos.
std::size_t first_rule_piece(const Problem& problem, const IssPath& path, StopKind rule, double sigma,
                             double factor) {
  for (std::size_t k = 0; k < path.num_pieces(); ++k) {
    const Vector r = problem.y() - problem.X() * path.beta_on_piece[k];
    const bool fires = rule == StopKind::residual_rule ? stop_rule_residual(r, sigma, problem.n())
                                                       : stop_rule_gradient(problem, r, sigma, factor);
    if (fires) return k;
  }
  return static_cast<std::size_t>(-1);
}

}  // namespace

SignTrialResult sign_consistency_trial(const Problem& problem, const GroundTruth& truth, StopKind stop,
                                       double gradient_factor) {
  if (truth.p() != problem.p()) throw InvalidArgument("sign_consistency_trial: truth/problem mismatch");
  SignTrialResult out;
  IssOptions opt;
  IssPath path;
  if (stop == StopKind::tau_bar) {
    const ConditionReport rep = check_conditions(problem, truth.support, truth.sigma > 0 ? std::optional<double>(truth.sigma) : std::nullopt);
    out.stop_time = rep.tau_bar.value_or(std::numeric_limits<double>::infinity());
    if (!(out.stop_time > 0.0)) return out;  // eta <= 0: the bound gives no time
    if (std::isfinite(out.stop_time)) opt.t_max = out.stop_time;
    path = iss_path(problem, opt);
  } else {
    path = iss_path(problem, opt);
    const std::size_t k = first_rule_piece(problem, path, stop, truth.sigma, gradient_factor);
    out.stop_time = k < path.num_pieces() ? path.breakpoints[k] : std::numeric_limits<double>::infinity();
  }
  for (std::size_t k = 0; k < path.num_pieces() && path.breakpoints[k] <= out.stop_time; ++k) {
    if (same_signs(path.beta_on_piece[k], truth.beta_star)) {
      out.hit = true;
      out.first_hit_t = path.breakpoints[k];
      out.oracle_gap = (path.beta_on_piece[k] - oracle_estimator(problem, truth.support)).cwiseAbs().maxCoeff();
      break;
    }
  }
  return out;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::iss: return "iss";
    case Method::lb: return "lb";
    case Method::lasso: return "lasso";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  if (s == "iss") return Method::iss;
  if (s == "lb") return Method::lb;
  if (s == "lasso") return Method::lasso;
  throw InvalidArgument("unknown method '" + s + "' (expected iss, lb or lasso)");
}

StopRunResult stop_run(const Problem& problem, const StopRunOptions& options) {
  if (!(options.sigma > 0.0)) throw InvalidArgument("stop_run: sigma must be positive");
  if (options.rule == StopKind::tau_bar) throw InvalidArgument("stop_run: rule must be residual or gradient");
  StopRunResult out;
  const bool residual_rule = options.rule == StopKind::residual_rule;
  out.threshold = residual_rule ? residual_rule_threshold(options.sigma, problem.n())
                                : gradient_rule_threshold(problem, options.sigma, options.gradient_factor);
  auto statistic = [&](const Vector& beta) {
    const Vector r = problem.y() - problem.X() * beta;
    return residual_rule ? r.norm() : (problem.X().transpose() * r).cwiseAbs().maxCoeff();
  };
  auto finish = [&](double t, const Vector& beta) {
    out.fired = true;
    out.time = t;
    out.beta = beta;
    out.support = support_of(beta);
    out.statistic = statistic(beta);
  };

  switch (options.method) {
    case Method::iss: {
      const IssPath path = iss_path(problem);
      const std::size_t k =
          first_rule_piece(problem, path, options.rule, options.sigma, options.gradient_factor);
      if (k < path.num_pieces()) finish(path.breakpoints[k], path.beta_on_piece[k]);
      else out.beta = path.beta_on_piece.back();
      break;
    }
    case Method::lb: {
      LbOptions opt;
      opt.max_iters = options.max_iters;
      opt.record_stride = options.max_iters + 1;
      opt.stop_rule = LbStopRule{residual_rule ? LbStopRule::Kind::residual : LbStopRule::Kind::gradient,
                                 options.sigma, options.gradient_factor};
      const LbTrace trace = lb_run(problem, options.kappa, options.alpha, opt);
      const LbRecord& last = trace.final_record();
      if (trace.stopping_reason == LbStop::rule_residual || trace.stopping_reason == LbStop::rule_gradient)
        finish(last.t, last.beta);
      else out.beta = last.beta;
      break;
    }
    case Method::lasso: {
      LassoGrid grid;
      grid.count = options.lasso_grid_count;
      const std::vector<double> lambdas = lasso_grid(problem, grid);
      Vector beta = Vector::Zero(problem.p());
      for (double lambda : lambdas) {
        beta = lasso_solve(problem, lambda, beta);
        const Vector r = problem.y() - problem.X() * beta;
        const bool fires = residual_rule ? stop_rule_residual(r, options.sigma, problem.n())
                                         : stop_rule_gradient(problem, r, options.sigma, options.gradient_factor);
        if (fires) {
          finish(1.0 / lambda, beta);
          break;
        }
      }
      if (!out.fired) out.beta = beta;
      break;
    }
  }
  if (!out.fired) out.statistic = statistic(out.beta);
  return out;
}

}  // namespace bregman
