#include "io.hpp"

#include <charconv>
#include <cmath>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace bregman::cli {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

namespace {

void write_comment(std::ostream& out, const std::vector<std::string>& comment) {
  for (const auto& line : comment) out << "# " << line << '\n';
}

}  // namespace

void write_matrix_csv(const std::string& path, const Matrix& M, const std::vector<std::string>& comment) {
  std::ostringstream out;
  write_comment(out, comment);
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      if (j) out << ',';
      out << format_double(M(i, j));
    }
    out << '\n';
  }
  write_text(path, out.str());
}

void write_vector_csv(const std::string& path, const Vector& v, const std::vector<std::string>& comment) {
  write_matrix_csv(path, Matrix(v), comment);
}

Matrix read_matrix_csv(const std::string& path) {
  std::istringstream in(read_text(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      const auto first = cell.find_first_not_of(" \t");
      const auto last = cell.find_last_not_of(" \t");
      double v = 0.0;
      bool ok = first != std::string::npos;
      if (ok) {
        const char* b = cell.data() + first;
        const char* e = cell.data() + last + 1;
        if (*b == '+') ++b;
        const auto res = std::from_chars(b, e, v);
        ok = res.ec == std::errc() && res.ptr == e && std::isfinite(v);
      }
      if (!ok) throw ConfigError(path + ":" + std::to_string(lineno) + ": not a number: '" + cell + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(rows.front().size()) +
                        " columns, found " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError(path + ": no data rows");
  Matrix M(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) M(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return M;
}

Vector read_vector_csv(const std::string& path) {
  const Matrix M = read_matrix_csv(path);
  if (M.cols() != 1) throw ConfigError(path + ": expected a single column");
  return M.col(0);
}

namespace {

// 1-based line of the first `"key"` followed by ':' in the raw text.
int line_of_key(const std::string& text, const std::string& key) {
  const std::string needle = "\"" + key + "\"";
  for (std::size_t at = text.find(needle); at != std::string::npos; at = text.find(needle, at + 1)) {
    std::size_t k = at + needle.size();
    while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
    if (k < text.size() && text[k] == ':') return 1 + static_cast<int>(std::count(text.begin(), text.begin() + at, '\n'));
  }
  return 0;
}

int line_of_offset(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

class Reader {
 public:
  Reader(const json& j, const std::string& text, std::string source)
      : j_(j), text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const int line = line_of_key(text_, key);
    throw ConfigError(source_ + (line ? ":" + std::to_string(line) : std::string()) + ": '" + key + "': " + msg);
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) fail(key, "expected a number");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail(key, "expected an integer");
      if constexpr (std::is_unsigned_v<T>)
        if (v.is_number_integer() && v.get<long long>() < 0 && !v.is_number_unsigned()) fail(key, "expected a nonnegative integer");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(key, "expected a string");
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      if (!v.is_array()) fail(key, "expected an array of numbers");
      for (const auto& e : v)
        if (!e.is_number()) fail(key, "expected an array of numbers");
    }
    out = v.get<T>();
  }

  void reject_unknown() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(it.key(), "unknown key");
  }

 private:
  const json& j_;
  const std::string& text_;
  std::string source_;
  std::set<std::string> seen_;
};

}  // namespace

StudyConfig parse_study_config(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ":" + std::to_string(line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1)) +
                      ": malformed JSON (" + e.what() + ")");
  }
  if (!j.is_object()) throw ConfigError(source + ": config must be a JSON object");
  Reader r(j, text, source);
  int version = 0;
  if (!j.contains("schema_version")) throw ConfigError(source + ": missing 'schema_version'");
  r.get("schema_version", version);
  if (version != kSchemaVersion)
    r.fail("schema_version", "unsupported version " + std::to_string(version) + " (expected " +
                                 std::to_string(kSchemaVersion) + ")");

  StudyConfig c;
  ExperimentConfig& b = c.base;
  r.get("n", b.n);
  r.get("p", b.p);
  r.get("s", b.s);
  if (j.contains("sigma") && j.contains("sigmas")) r.fail("sigmas", "give either 'sigma' or 'sigmas', not both");
  if (j.contains("sigma")) {
    double s = 0.0;
    r.get("sigma", s);
    c.sigmas = {s};
  }
  r.get("sigmas", c.sigmas);
  if (c.sigmas.empty()) r.fail("sigmas", "must not be empty");
  b.sigma = c.sigmas.front();
  std::string cov = "constant_offdiag";
  r.get("covariance", cov);
  if (cov == "identity") b.covariance = Covariance::identity;
  else if (cov == "constant_offdiag") b.covariance = Covariance::constant_offdiag;
  else r.fail("covariance", "expected \"identity\" or \"constant_offdiag\"");
  if (j.contains("offdiag")) {
    double v = 0.0;
    r.get("offdiag", v);
    b.offdiag = v;
  }
  r.get("kappa_list", b.kappa_list);
  r.get("kappa_alpha", b.kappa_alpha);
  r.get("reps", b.reps);
  r.get("seed", b.seed);
  r.get("lasso_grid_count", b.lasso_grid_count);
  r.get("lb_horizon_factor", b.lb_horizon_factor);
  r.get("lb_max_iters", b.lb_max_iters);
  r.get("threads", b.threads);
  r.reject_unknown();
  for (double s : c.sigmas)
    if (!(s >= 0.0)) r.fail("sigmas", "noise levels must be nonnegative");
  try {
    b.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return c;
}

ordered_json to_json(const StudyConfig& c) {
  const ExperimentConfig& b = c.base;
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["n"] = b.n;
  j["p"] = b.p;
  j["s"] = b.s;
  j["sigmas"] = c.sigmas;
  j["covariance"] = b.covariance == Covariance::identity ? "identity" : "constant_offdiag";
  if (b.offdiag) j["offdiag"] = *b.offdiag;
  j["kappa_list"] = b.kappa_list;
  j["kappa_alpha"] = b.kappa_alpha;
  j["reps"] = b.reps;
  j["seed"] = b.seed;
  j["lasso_grid_count"] = b.lasso_grid_count;
  j["lb_horizon_factor"] = b.lb_horizon_factor;
  j["lb_max_iters"] = b.lb_max_iters;
  j["threads"] = b.threads;
  return j;
}

ordered_json truth_to_json(const GroundTruth& truth, std::uint64_t seed) {
  ordered_json j;
  j["beta_star"] = std::vector<double>(truth.beta_star.data(), truth.beta_star.data() + truth.beta_star.size());
  j["support"] = truth.support;
  j["sigma"] = truth.sigma;
  j["seed"] = seed;
  return j;
}

GroundTruth truth_from_json(const json& j) {
  try {
    const auto b = j.at("beta_star").get<std::vector<double>>();
    const double sigma = j.at("sigma").get<double>();
    GroundTruth t = GroundTruth::from_beta(Eigen::Map<const Vector>(b.data(), static_cast<Index>(b.size())), sigma);
    if (j.contains("support") && j.at("support").get<IndexSet>() != t.support)
      throw ConfigError("truth.json: 'support' disagrees with the nonzeros of 'beta_star'");
    return t;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("truth.json: ") + e.what());
  }
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace bregman::cli
