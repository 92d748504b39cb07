#include <bregman/lb.hpp>

#include <algorithm>
#include <cmath>

namespace bregman {

namespace {

// z' = b - kappa * G * shrink(z, 1) with G = X^T X / n, b = X^T y / n.
class LbissField {
 public:
  LbissField(const Problem& problem, double kappa)
      : G_(problem.X().transpose() * problem.X() / double(problem.n())),
        b_(problem.X().transpose() * problem.y() / double(problem.n())),
        kappa_(kappa) {}

  Vector operator()(const Vector& z) const { return b_ - kappa_ * (G_ * shrink(z, 1.0)); }

  Vector rk4(const Vector& z, double h) const {
    const Vector k1 = (*this)(z);
    const Vector k2 = (*this)(z + 0.5 * h * k1);
    const Vector k3 = (*this)(z + 0.5 * h * k2);
    const Vector k4 = (*this)(z + h * k3);
    return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

 private:
  Matrix G_;
  Vector b_;
  double kappa_;
};

std::vector<std::int8_t> pattern_of(const Vector& z) {
  std::vector<std::int8_t> s(static_cast<std::size_t>(z.size()));
  for (Index i = 0; i < z.size(); ++i) s[static_cast<std::size_t>(i)] = z[i] > 1.0 ? 1 : (z[i] < -1.0 ? -1 : 0);
  return s;
}

}  // namespace

LbissSamples lbiss_integrate(const Problem& problem, double kappa, const LbissOptions& options) {
  if (!(kappa > 0.0)) throw InvalidArgument("lbiss_integrate: kappa must be positive");
  if (!(options.t_max > 0.0) || !std::isfinite(options.t_max))
    throw InvalidArgument("lbiss_integrate: t_max must be positive and finite");
  if (!(options.event_tol > 0.0) || !(options.local_tol > 0.0))
    throw InvalidArgument("lbiss_integrate: tolerances must be positive");

  std::vector<double> samples = options.sample_times;
  std::sort(samples.begin(), samples.end());
  for (double s : samples)
    if (s < 0.0 || s > options.t_max) throw InvalidArgument("lbiss_integrate: sample time outside [0, t_max]");

  const Index p = problem.p();
  const Index max_events = options.max_events > 0 ? options.max_events : 100 * p;
  const LbissField field(problem, kappa);

  LbissSamples out;
  out.kappa = kappa;
  auto emit = [&](double t, const Vector& z) {
    Vector beta = kappa * shrink(z, 1.0);
    out.times.push_back(t);
    out.rho.push_back(z - beta / kappa);
    out.beta.push_back(std::move(beta));
    out.z.push_back(z);
  };

  double t = 0.0;
  Vector z = Vector::Zero(p);
  auto pattern = pattern_of(z);
  std::size_t next = 0;
  while (next < samples.size() && samples[next] <= 0.0) emit(samples[next++], z);

  const double h_max = options.t_max / 16.0;
  double h = std::min(h_max, 1e-3);

  while (t < options.t_max) {
    double h_try = std::min(h, options.t_max - t);
    const bool to_sample = next < samples.size() && t + h_try >= samples[next];
    if (to_sample) h_try = samples[next] - t;

    // Step doubling: one full step against two half steps.
    const Vector full = field.rk4(z, h_try);
    const Vector half = field.rk4(field.rk4(z, 0.5 * h_try), 0.5 * h_try);
    const double scale = std::max(1.0, z.cwiseAbs().maxCoeff());
    const double err = (half - full).cwiseAbs().maxCoeff() / 15.0;
    const auto end_pattern = pattern_of(half);
    const bool crosses = end_pattern != pattern;

    if (err > options.local_tol * scale && h_try > options.event_tol && !crosses) {
      h = h_try * std::max(0.1, 0.9 * std::pow(options.local_tol * scale / err, 0.2));
      continue;
    }

    if (crosses && h_try > options.event_tol) {
      // Bisect on the step length for the first pattern change.
      double lo = 0.0, hi = h_try;
      while (hi - lo > options.event_tol) {
        const double mid = 0.5 * (lo + hi);
        if (pattern_of(field.rk4(z, mid)) == pattern) lo = mid;
        else hi = mid;
      }
      if (lo > 0.0) {
        // Advance to just before the crossing with controlled substeps.
        double done = 0.0;
        while (done < lo) {
          const double sub = std::min(lo - done, h);
          const Vector f1 = field.rk4(z, sub);
          const Vector f2 = field.rk4(field.rk4(z, 0.5 * sub), 0.5 * sub);
          const double e = (f2 - f1).cwiseAbs().maxCoeff() / 15.0;
          if (e > options.local_tol * std::max(1.0, z.cwiseAbs().maxCoeff()) && sub > options.event_tol) {
            h = sub * 0.5;
            continue;
          }
          z = f2 + (f2 - f1) / 15.0;
          done += sub;
        }
        t += lo;
      }
      z = field.rk4(z, hi - lo);
      t += hi - lo;
      pattern = pattern_of(z);
      out.event_times.push_back(t);
      if (static_cast<Index>(out.event_times.size()) >= max_events) {
        out.truncated = true;
        break;
      }
      while (next < samples.size() && samples[next] <= t) emit(samples[next++], z);
      continue;
    }

    z = half + (half - full) / 15.0;
    t = to_sample ? samples[next] : t + h_try;
    if (!z.allFinite()) throw DivergenceError("lbiss_integrate: non-finite state");
    pattern = pattern_of(z);
    if (crosses) out.event_times.push_back(t);
    while (next < samples.size() && samples[next] <= t) emit(samples[next++], z);
    if (err > 0.0) h = std::min(h_max, h_try * std::min(4.0, 0.9 * std::pow(options.local_tol * scale / err, 0.2)));
    else h = std::min(h_max, h_try * 4.0);
  }
  return out;
}

}  // namespace bregman
