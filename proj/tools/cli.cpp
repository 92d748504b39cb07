#include "cli.hpp"

#include "io.hpp"

#include <bregman/diagnostics.hpp>
#include <bregman/experiments.hpp>
#include <bregman/iss.hpp>
#include <bregman/lasso.hpp>
#include <bregman/lb.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace bregman::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct Args {
  std::string command;
  std::string config;
  std::string out_dir = ".";
  std::string data_dir = ".";
  std::string method = "iss";
  std::string rule = "residual";
  std::string truth;
  std::string support;
  std::string manifest;
  std::optional<std::uint64_t> seed;
  std::optional<double> kappa, alpha, sigma, t_max, lambda_min;
  std::optional<Index> max_iters;
  Index grid_count = 100;
  std::vector<double> lambdas;
  double gradient_factor = 1.0;
  /// Set by replay: the config content recorded in the manifest.
  std::optional<std::string> config_snapshot;
};

template <typename T>
void put_opt(ordered_json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
void get_opt(const json& j, const char* key, std::optional<T>& v) {
  if (j.contains(key)) v = j.at(key).get<T>();
}

ordered_json args_to_json(const Args& a) {
  ordered_json j;
  j["config"] = a.config;
  j["out_dir"] = a.out_dir;
  j["data_dir"] = a.data_dir;
  j["method"] = a.method;
  j["rule"] = a.rule;
  j["truth"] = a.truth;
  j["support"] = a.support;
  put_opt(j, "seed", a.seed);
  put_opt(j, "kappa", a.kappa);
  put_opt(j, "alpha", a.alpha);
  put_opt(j, "sigma", a.sigma);
  put_opt(j, "t_max", a.t_max);
  put_opt(j, "lambda_min", a.lambda_min);
  put_opt(j, "max_iters", a.max_iters);
  j["grid_count"] = a.grid_count;
  j["lambdas"] = a.lambdas;
  j["gradient_factor"] = a.gradient_factor;
  return j;
}

Args args_from_json(const std::string& command, const json& j) {
  Args a;
  a.command = command;
  a.config = j.value("config", "");
  a.out_dir = j.value("out_dir", ".");
  a.data_dir = j.value("data_dir", ".");
  a.method = j.value("method", "iss");
  a.rule = j.value("rule", "residual");
  a.truth = j.value("truth", "");
  a.support = j.value("support", "");
  get_opt(j, "seed", a.seed);
  get_opt(j, "kappa", a.kappa);
  get_opt(j, "alpha", a.alpha);
  get_opt(j, "sigma", a.sigma);
  get_opt(j, "t_max", a.t_max);
  get_opt(j, "lambda_min", a.lambda_min);
  get_opt(j, "max_iters", a.max_iters);
  a.grid_count = j.value("grid_count", Index{100});
  a.lambdas = j.value("lambdas", std::vector<double>{});
  a.gradient_factor = j.value("gradient_factor", 1.0);
  return a;
}

struct Outcome {
  int code = kOk;
  std::vector<std::string> outputs;
  std::optional<StudyConfig> config;
  std::optional<std::uint64_t> seed;
};

std::string in_dir(const Args& a, const std::string& name) { return (fs::path(a.out_dir) / name).string(); }

StudyConfig load_config(const Args& a) {
  if (a.config_snapshot) return parse_study_config(*a.config_snapshot, "manifest config");
  if (a.config.empty()) throw ConfigError("--config is required");
  StudyConfig c = parse_study_config(read_text(a.config), a.config);
  if (a.seed) c.base.seed = *a.seed;
  return c;
}

Problem load_problem(const Args& a) {
  const fs::path dir(a.data_dir);
  Matrix X = read_matrix_csv((dir / "X.csv").string());
  Vector y = read_vector_csv((dir / "y.csv").string());
  if (X.rows() != y.size())
    throw ConfigError("X.csv has " + std::to_string(X.rows()) + " rows but y.csv has " + std::to_string(y.size()));
  try {
    return Problem(std::move(X), std::move(y));
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

// ---- gen-data ---------------------------------------------------------------

Outcome cmd_gen_data(const Args& a, std::ostream& out) {
  Outcome o;
  StudyConfig c = load_config(a);
  o.config = c;
  o.seed = c.base.seed;
  const Instance inst = generate_instance(c.base, Index{0});
  const std::string head = "n=" + std::to_string(inst.problem.n()) + " p=" + std::to_string(inst.problem.p());
  write_matrix_csv(in_dir(a, "X.csv"), inst.problem.X(), {head});
  write_vector_csv(in_dir(a, "y.csv"), inst.problem.y(), {"n=" + std::to_string(inst.problem.n())});
  write_text(in_dir(a, "truth.json"), dump(truth_to_json(inst.truth, c.base.seed)));
  o.outputs = {"X.csv", "y.csv", "truth.json"};
  out << "wrote " << head << " s=" << inst.truth.s() << " to " << a.out_dir << "\n";
  return o;
}

// ---- solve ------------------------------------------------------------------

Outcome cmd_solve(const Args& a, std::ostream& out) {
  Outcome o;
  const Problem problem = load_problem(a);
  std::ostringstream csv;
  const std::string dims = "n=" + std::to_string(problem.n()) + " p=" + std::to_string(problem.p());

  if (a.method == "iss") {
    IssOptions opt;
    if (a.t_max) opt.t_max = *a.t_max;
    if (a.max_iters) opt.max_breakpoints = *a.max_iters;
    const IssPath path = iss_path(problem, opt);
    csv << "# method=iss " << dims << " pieces=" << path.num_pieces()
        << " stop=" << (path.stop == IssStop::terminated ? "terminated" : path.truncated() ? "max_breakpoints" : "t_max")
        << " horizon=" << format_double(path.horizon) << "\n";
    csv << "# each piece k holds beta on [t_k, t_{k+1}); rho is rho(t_k); non_unique flags rank-deficient pieces\n";
    csv << "t,piece,coordinate,beta,rho,non_unique\n";
    for (std::size_t k = 0; k < path.num_pieces(); ++k)
      for (Index i = 0; i < problem.p(); ++i)
        csv << format_double(path.breakpoints[k]) << ',' << k << ',' << i << ','
            << format_double(path.beta_on_piece[k][i]) << ',' << format_double(path.rho_at[k][i]) << ','
            << (path.non_unique[k] ? 1 : 0) << '\n';
    out << "iss: " << path.num_pieces() << " pieces, last breakpoint " << format_double(path.last_breakpoint()) << "\n";
  } else if (a.method == "lb") {
    const double kappa = a.kappa.value_or(64.0);
    const double alpha = a.alpha.value_or(0.1 / kappa);
    LbOptions opt;
    opt.max_iters = a.max_iters.value_or(100000);
    if (a.t_max) opt.t_max = *a.t_max;
    const Index iters = std::min<double>(double(opt.max_iters), std::floor(opt.t_max / alpha));
    opt.record_stride = std::max<Index>(1, iters / 2000);
    const LbTrace trace = lb_run(problem, kappa, alpha, opt);
    csv << "# method=lb " << dims << " kappa=" << format_double(kappa) << " alpha=" << format_double(alpha)
        << " iterations=" << trace.iterations << " stop=" << to_string(trace.stopping_reason)
        << " stride=" << opt.record_stride << "\n";
    for (const auto& w : trace.warnings) csv << "# warning: " << w << "\n";
    csv << "k,t,coordinate,beta,z\n";
    for (const LbRecord& r : trace.records)
      for (Index i = 0; i < problem.p(); ++i)
        csv << r.k << ',' << format_double(r.t) << ',' << i << ',' << format_double(r.beta[i]) << ','
            << format_double(r.z[i]) << '\n';
    for (const auto& w : trace.warnings) out << "warning: " << w << "\n";
    out << "lb: " << trace.iterations << " iterations (" << to_string(trace.stopping_reason) << ")\n";
  } else if (a.method == "lbiss") {
    const double kappa = a.kappa.value_or(64.0);
    LbissOptions opt;
    opt.t_max = a.t_max.value_or(10.0);
    const Index samples = a.max_iters.value_or(1000);
    for (Index k = 0; k <= samples; ++k) opt.sample_times.push_back(opt.t_max * double(k) / double(samples));
    const LbissSamples res = lbiss_integrate(problem, kappa, opt);
    csv << "# method=lbiss " << dims << " kappa=" << format_double(kappa) << " events=" << res.event_times.size()
        << " truncated=" << (res.truncated ? 1 : 0) << "\n";
    csv << "t,coordinate,beta,rho\n";
    for (std::size_t k = 0; k < res.times.size(); ++k)
      for (Index i = 0; i < problem.p(); ++i)
        csv << format_double(res.times[k]) << ',' << i << ',' << format_double(res.beta[k][i]) << ','
            << format_double(res.rho[k][i]) << '\n';
    out << "lbiss: " << res.event_times.size() << " events up to t=" << format_double(opt.t_max) << "\n";
  } else if (a.method == "lasso") {
    LassoPath path;
    if (!a.lambdas.empty()) {
      path = lasso_path(problem, a.lambdas);
    } else {
      LassoGrid grid;
      grid.count = a.grid_count;
      grid.lambda_min = a.lambda_min;
      path = lasso_path(problem, grid);
    }
    csv << "# method=lasso " << dims << " points=" << path.lambda_grid.size() << "\n";
    csv << "lambda,t,coordinate,beta\n";
    for (std::size_t k = 0; k < path.lambda_grid.size(); ++k)
      for (Index i = 0; i < problem.p(); ++i)
        csv << format_double(path.lambda_grid[k]) << ',' << format_double(1.0 / path.lambda_grid[k]) << ',' << i
            << ',' << format_double(path.solutions[k][i]) << '\n';
    out << "lasso: " << path.lambda_grid.size() << " grid points\n";
  } else {
    throw ConfigError("unknown method '" + a.method + "' (expected iss, lb, lbiss or lasso)");
  }
  write_text(in_dir(a, "path.csv"), csv.str());
  o.outputs = {"path.csv"};
  return o;
}

// ---- diagnose ---------------------------------------------------------------

IndexSet parse_support(const std::string& s, Index p) {
  IndexSet out;
  std::istringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    std::size_t used = 0;
    long long v = -1;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || v < 0 || v >= p) throw ConfigError("--support: bad index '" + tok + "'");
    out.push_back(static_cast<Index>(v));
  }
  return normalize_index_set(out);
}

Outcome cmd_diagnose(const Args& a, std::ostream& out) {
  Outcome o;
  const Problem problem = load_problem(a);
  std::optional<GroundTruth> truth;
  std::string truth_path = a.truth;
  if (truth_path.empty() && fs::exists(fs::path(a.data_dir) / "truth.json"))
    truth_path = (fs::path(a.data_dir) / "truth.json").string();
  if (!truth_path.empty()) {
    json j;
    try {
      j = json::parse(read_text(truth_path));
    } catch (const json::parse_error& e) {
      throw ConfigError(truth_path + ": " + e.what());
    }
    truth = truth_from_json(j);
    if (truth->p() != problem.p()) throw ConfigError("truth.json length does not match X.csv");
  }
  std::optional<IndexSet> support;
  if (!a.support.empty()) support = parse_support(a.support, problem.p());
  else if (truth) support = truth->support;
  std::optional<double> sigma = a.sigma;
  if (!sigma && truth) sigma = truth->sigma;

  ordered_json r;
  r["n"] = problem.n();
  r["p"] = problem.p();
  r["mu"] = mutual_coherence(problem.X());
  const std::string missing = "unavailable: no support (give --support or truth.json)";
  if (!support || support->empty()) {
    for (const char* k : {"support", "gamma", "gamma_max", "eta", "cond_number", "tau_bar", "strong_signal", "a3"})
      r[k] = missing;
  } else {
    r["support"] = *support;
    const Index s = static_cast<Index>(support->size());
    try {
      const ConditionReport rep =
          check_conditions(problem, *support, sigma && *sigma > 0 ? sigma : std::optional<double>{});
      r["gamma"] = rep.gamma;
      r["gamma_max"] = rep.gamma_max;
      r["eta"] = rep.eta;
      r["cond_number"] = rep.cond_number;
      r["max_colnorm_T"] = rep.max_colnorm_T;
      if (rep.tau_bar) r["tau_bar"] = *rep.tau_bar;
      else r["tau_bar"] = "unavailable: needs sigma > 0, p >= 2 and eta > 0";
      if (truth && truth->support == *support) {
        r["strong_signal"] = strong_signal_check(rep, *truth, problem.n(), problem.p(), rep.max_colnorm_T);
        if (sigma && *sigma > 0 && rep.eta > 0)
          r["strong_signal_threshold"] =
              strong_signal_threshold(rep, *sigma, problem.n(), problem.p(), rep.max_colnorm_T);
      } else {
        r["strong_signal"] = "unavailable: needs truth.json";
      }
    } catch (const SingularMatrixError& e) {
      const std::string msg = std::string("error: ") + e.what();
      for (const char* k : {"gamma", "gamma_max", "eta", "cond_number", "tau_bar", "strong_signal"}) r[k] = msg;
    }
    const double bound = 1.0 / double(2 * s - 1);
    r["a3"] = {{"holds", r["mu"].get<double>() < bound}, {"bound", bound}};
  }
  write_text(in_dir(a, "report.json"), dump(r));
  o.outputs = {"report.json"};
  out << r.dump(2) << "\n";
  return o;
}

// ---- experiment -------------------------------------------------------------

Outcome cmd_experiment(const Args& a, std::ostream& out) {
  Outcome o;
  StudyConfig c = load_config(a);
  o.config = c;
  o.seed = c.base.seed;
  std::ostringstream table, rows;
  table << "sigma,method,kappa,mean_auc,std_auc,reps\n";
  rows << "method,kappa,sigma,rep,auc\n";
  ordered_json summary;
  summary["table"] = json::array();
  out << std::left << std::setw(8) << "sigma" << std::setw(10) << "method" << std::setw(8) << "kappa"
      << "mean (std)\n";
  for (double sigma : c.sigmas) {
    ExperimentConfig cfg = c.base;
    cfg.sigma = sigma;
    const AucStudy study = run_auc_study(cfg);
    for (const MethodSummary& m : study.summary) {
      table << format_double(sigma) << ',' << m.method << ',' << format_double(m.kappa) << ','
            << format_double(m.mean_auc) << ',' << format_double(m.std_auc) << ',' << m.reps << '\n';
      summary["table"].push_back({{"sigma", sigma},
                                  {"method", m.method},
                                  {"kappa", m.kappa},
                                  {"mean_auc", m.mean_auc},
                                  {"std_auc", m.std_auc},
                                  {"reps", m.reps},
                                  {"failed", m.failed}});
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(4) << m.mean_auc << " (" << m.std_auc << ")";
      out << std::setw(8) << sigma << std::setw(10) << m.method << std::setw(8)
          << (m.kappa > 0 ? std::to_string(static_cast<long long>(m.kappa)) : "-") << cell.str() << "\n";
    }
    for (const AucRow& r : study.rows)
      rows << r.method << ',' << format_double(r.kappa) << ',' << format_double(r.sigma) << ',' << r.rep << ','
           << format_double(r.auc) << '\n';
    for (const auto& d : study.diagnostics) summary["diagnostics"].push_back(d);
  }
  if (c.base.reps == 1) summary["std_note"] = "reps = 1: standard deviations are reported as 0";
  write_text(in_dir(a, "table.csv"), table.str());
  write_text(in_dir(a, "rows.csv"), rows.str());
  write_text(in_dir(a, "summary.json"), dump(summary));
  o.outputs = {"table.csv", "rows.csv", "summary.json"};
  return o;
}

// ---- stop-run ---------------------------------------------------------------

Outcome cmd_stop_run(const Args& a, std::ostream& out) {
  Outcome o;
  if (!a.sigma) throw ConfigError("--sigma is required for stop-run");
  if (!(*a.sigma > 0.0)) throw ConfigError("--sigma must be positive");
  const Problem problem = load_problem(a);
  StopRunOptions opt;
  try {
    opt.method = method_from_string(a.method);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (a.rule == "residual") opt.rule = StopKind::residual_rule;
  else if (a.rule == "gradient") opt.rule = StopKind::gradient_rule;
  else throw ConfigError("--rule must be residual or gradient");
  opt.sigma = *a.sigma;
  opt.gradient_factor = a.gradient_factor;
  opt.kappa = a.kappa.value_or(64.0);
  opt.alpha = a.alpha.value_or(0.1 / opt.kappa);
  if (a.max_iters) opt.max_iters = *a.max_iters;
  opt.lasso_grid_count = a.grid_count;
  const StopRunResult res = stop_run(problem, opt);

  ordered_json j;
  j["method"] = a.method;
  j["rule"] = a.rule;
  j["sigma"] = *a.sigma;
  j["fired"] = res.fired;
  j["result"] = res.fired ? "stopped" : "no-stop";
  if (res.fired) j["stop_time"] = res.time;
  j["fired_at_start"] = res.fired && res.support.empty();
  j["support"] = res.support;
  j["beta"] = std::vector<double>(res.beta.data(), res.beta.data() + res.beta.size());
  j["threshold"] = res.threshold;
  j["statistic"] = res.statistic;
  write_text(in_dir(a, "selected_model.json"), dump(j));
  o.outputs = {"selected_model.json"};
  if (!res.fired) {
    out << "no-stop: rule never fired before the horizon\n";
    o.code = kNoStop;
  } else {
    out << "stopped at " << format_double(res.time) << " with " << res.support.size() << " selected\n";
  }
  return o;
}

Outcome dispatch(const Args& a, std::ostream& out) {
  fs::create_directories(a.out_dir);
  if (a.command == "gen-data") return cmd_gen_data(a, out);
  if (a.command == "solve") return cmd_solve(a, out);
  if (a.command == "diagnose") return cmd_diagnose(a, out);
  if (a.command == "experiment") return cmd_experiment(a, out);
  if (a.command == "stop-run") return cmd_stop_run(a, out);
  throw ConfigError("unknown command '" + a.command + "'");
}

void write_manifest(const Args& a, const Outcome& o, double wall) {
  ordered_json m;
  m["tool"] = "bregman";
  m["tool_version"] = kToolVersion;
  m["command"] = a.command;
  m["args"] = args_to_json(a);
  m["config"] = o.config ? to_json(*o.config) : ordered_json(nullptr);
  m["seed"] = o.seed ? ordered_json(*o.seed) : ordered_json(nullptr);
  m["outputs"] = o.outputs;
  m["exit_code"] = o.code;
  m["wall_time_s"] = wall;
  write_text(in_dir(a, "manifest.json"), dump(m));
}

int run(const Args& a, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const Outcome o = dispatch(a, out);
  write_manifest(a, o, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return o.code;
}

Args replay_args(const std::string& manifest_path, const std::string& out_dir) {
  json m;
  try {
    m = json::parse(read_text(manifest_path));
    Args a = args_from_json(m.at("command").get<std::string>(), m.at("args"));
    if (!m.at("config").is_null()) a.config_snapshot = m.at("config").dump();
    if (!out_dir.empty()) a.out_dir = out_dir;
    return a;
  } catch (const json::exception& e) {
    throw ConfigError(manifest_path + ": not a run manifest (" + e.what() + ")");
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse recovery paths by Bregman inverse scale space, linearized Bregman and LASSO"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("bregman ") + kToolVersion);
  Args a;
  std::uint64_t seed = 0;
  double kappa = 0, alpha = 0, sigma = 0, t_max = 0, lambda_min = 0;
  Index max_iters = 0;

  auto common_out = [&](CLI::App* c) { c->add_option("--out-dir", a.out_dir, "Output directory")->capture_default_str(); };
  auto data_in = [&](CLI::App* c) {
    c->add_option("--data-dir", a.data_dir, "Directory holding X.csv and y.csv")->capture_default_str();
  };

  auto* gen = app.add_subcommand("gen-data", "Draw a synthetic instance (X.csv, y.csv, truth.json)");
  gen->add_option("--config", a.config, "JSON config")->required();
  gen->add_option("--seed", seed, "Override the config seed");
  common_out(gen);

  auto* solve = app.add_subcommand("solve", "Compute a regularization path (path.csv)");
  solve->add_option("--method", a.method, "iss | lb | lbiss | lasso")->capture_default_str();
  data_in(solve);
  common_out(solve);
  solve->add_option("--kappa", kappa, "LB / LBISS damping (default 64)");
  solve->add_option("--alpha", alpha, "LB step (default 0.1 / kappa)");
  solve->add_option("--t-max", t_max, "Path horizon");
  solve->add_option("--max-iters", max_iters, "LB iterations, ISS breakpoints, or LBISS sample count");
  solve->add_option("--grid-count", a.grid_count, "LASSO grid size")->capture_default_str();
  solve->add_option("--lambda-min", lambda_min, "Smallest LASSO lambda");
  solve->add_option("--lambdas", a.lambdas, "Explicit decreasing LASSO lambdas")->delimiter(',');

  auto* diag = app.add_subcommand("diagnose", "Report gamma, eta, mu, tau_bar (report.json)");
  data_in(diag);
  common_out(diag);
  diag->add_option("--truth", a.truth, "truth.json (defaults to <data-dir>/truth.json if present)");
  diag->add_option("--support", a.support, "Comma-separated support guess");
  diag->add_option("--sigma", sigma, "Noise level");

  auto* exp = app.add_subcommand("experiment", "Monte Carlo AUC study (table.csv, rows.csv, summary.json)");
  exp->add_option("--config", a.config, "JSON config")->required();
  exp->add_option("--seed", seed, "Override the config seed");
  common_out(exp);

  auto* stop = app.add_subcommand("stop-run", "Run a path with a data-dependent stopping rule (selected_model.json)");
  stop->add_option("--method", a.method, "iss | lb | lasso")->capture_default_str();
  data_in(stop);
  common_out(stop);
  stop->add_option("--sigma", sigma, "Noise level")->required();
  stop->add_option("--rule", a.rule, "residual | gradient")->capture_default_str();
  stop->add_option("--gradient-factor", a.gradient_factor, "Multiplier on the gradient-rule threshold");
  stop->add_option("--kappa", kappa, "LB damping");
  stop->add_option("--alpha", alpha, "LB step");
  stop->add_option("--max-iters", max_iters, "LB iteration cap");
  stop->add_option("--grid-count", a.grid_count, "LASSO grid size");

  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest.json");
  std::string replay_out;
  replay->add_option("manifest", a.manifest, "manifest.json")->required();
  replay->add_option("--out-dir", replay_out, "Output directory (defaults to the recorded one)");

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  auto given = [](CLI::App* c, const char* name) { return c->count(name) > 0; };
  for (CLI::App* c : {gen, solve, diag, exp, stop}) {
    if (!c->parsed()) continue;
    a.command = c->get_name();
    if (c->get_option_no_throw("--seed") && given(c, "--seed")) a.seed = seed;
    if (c->get_option_no_throw("--kappa") && given(c, "--kappa")) a.kappa = kappa;
    if (c->get_option_no_throw("--alpha") && given(c, "--alpha")) a.alpha = alpha;
    if (c->get_option_no_throw("--sigma") && given(c, "--sigma")) a.sigma = sigma;
    if (c->get_option_no_throw("--t-max") && given(c, "--t-max")) a.t_max = t_max;
    if (c->get_option_no_throw("--lambda-min") && given(c, "--lambda-min")) a.lambda_min = lambda_min;
    if (c->get_option_no_throw("--max-iters") && given(c, "--max-iters")) a.max_iters = max_iters;
  }

  try {
    if (replay->parsed()) return run(replay_args(a.manifest, replay_out), out);
    return run(a, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InvalidArgument& e) {
    err << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const fs::filesystem_error& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace bregman::cli
