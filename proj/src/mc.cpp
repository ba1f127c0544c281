#include "stein_wilks/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "stein_wilks/kernels.hpp"
#include "stein_wilks/models.hpp"
#include "stein_wilks/stats.hpp"

namespace stein_wilks {

double chisq_expectation(const TestFunction& h, int r) {
  if (r < 1) throw ConfigError("chi-square expectation needs r >= 1");
  using boost::math::quadrature::gauss_kronrod;
  const double half = 0.5 * r;
  const double log_norm = half * std::log(2.0) + boost::math::lgamma(half);
  // On [0, 1] with x = u^2: f(u^2) 2u = 2 u^(r-1) e^(-u^2/2) / (2^(r/2) Gamma(r/2)).
  auto near = [&](double u) {
    if (u <= 0.0) return r == 1 ? 2.0 * h.h(0.0) * std::exp(-log_norm) : 0.0;
    return h.h(u * u) * 2.0 * std::exp((r - 1) * std::log(u) - 0.5 * u * u - log_norm);
  };
  const boost::math::chi_squared_distribution<double> dist(r);
  auto far = [&](double x) { return h.h(x) * boost::math::pdf(dist, x); };

  // [1, cut] is finite; the tail beyond a few standard deviations goes to the
  // infinite-range rule. The reported errors are absolute.
  const double cut = r + 10.0 * std::sqrt(2.0 * r) + 20.0;
  using GK = gauss_kronrod<double, 61>;
  double err_near = 0.0, err_mid = 0.0, err_far = 0.0;
  const double a = GK::integrate(near, 0.0, 1.0, 15, 1e-13, &err_near);
  const double b = GK::integrate(far, 1.0, cut, 15, 1e-13, &err_mid);
  const double t = GK::integrate(far, cut, std::numeric_limits<double>::infinity(), 15, 1e-13, &err_far);
  const double value = a + b + t;
  const double abs_err = err_near + err_mid + 2.0 * err_far;
  if (!std::isfinite(value) || abs_err > 1e-10 * std::max(1.0, std::abs(value))) {
    throw QuadratureNonconvergence(value, abs_err);
  }
  return value;
}

MCEstimate distance_from_statistics(std::span<const double> statistics, const TestFunction& h,
                                    int r, std::uint64_t master_seed) {
  MCEstimate e;
  e.reps = statistics.size();
  e.master_seed = master_seed;
  RunningStats acc;
  for (double s : statistics) {
    if (s != s) {
      ++e.failed_reps;
      continue;
    }
    acc.add(h.h(s));
  }
  if (e.failed_reps * 1000 > e.reps) throw ExcessiveFitFailures(e.failed_reps, e.reps);
  e.reference = chisq_expectation(h, r);
  e.mc_expectation = acc.mean();
  e.mean = std::abs(acc.mean() - e.reference);
  e.stderr_ = acc.stderr_of_mean();
  return e;
}

MCEstimate estimate_distance(const ParametricModel& model, const Vector& theta0, std::size_t n,
                             int r, const TestFunction& h, std::size_t reps,
                             std::uint64_t master_seed, int threads) {
  if (reps < 10000) throw ConfigError("estimate_distance needs reps >= 1e4");
  const SimulationResult sim = simulate_statistics(model, theta0, n, r, reps, master_seed, threads);
  return distance_from_statistics(sim.statistics, h, r, master_seed);
}

double ks_distance_chisq(std::span<const double> sample, int r) {
  if (r < 1) throw ConfigError("KS distance needs r >= 1");
  std::vector<double> x;
  x.reserve(sample.size());
  for (double v : sample)
    if (v == v) x.push_back(v);
  if (x.empty()) throw ConfigError("KS distance needs at least one finite value");
  std::sort(x.begin(), x.end());
  const boost::math::chi_squared_distribution<double> dist(r);
  const double m = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = x[i] <= 0.0 ? 0.0 : boost::math::cdf(dist, x[i]);
    d = std::max({d, static_cast<double>(i + 1) / m - F, F - static_cast<double>(i) / m});
  }
  return d;
}

double wilks_ks_check(const ParametricModel& model, const Vector& theta0, std::size_t n, int r,
                      std::size_t reps, std::uint64_t master_seed, int threads) {
  if (reps < 10000) throw ConfigError("wilks_ks_check needs reps >= 1e4");
  const SimulationResult sim = simulate_statistics(model, theta0, n, r, reps, master_seed, threads);
  if (sim.failed * 1000 > reps) throw ExcessiveFitFailures(sim.failed, reps);
  return ks_distance_chisq(sim.statistics, r);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("slope needs two or more points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ConfigError("log-log slope needs positive values");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

RateSweep rate_sweep(const std::function<double(std::size_t)>& bound,
                     std::span<const std::size_t> n_grid) {
  if (n_grid.size() < 4) throw ConfigError("rate sweep needs at least 4 grid points");
  const auto [lo, hi] = std::minmax_element(n_grid.begin(), n_grid.end());
  if (*lo < 1 || static_cast<double>(*hi) < 1000.0 * static_cast<double>(*lo)) {
    throw ConfigError("rate sweep grid must span at least 3 decades");
  }
  RateSweep out;
  std::vector<double> xs, ys;
  for (std::size_t n : n_grid) {
    SweepRow row;
    row.key = static_cast<double>(n);
    row.bound_total = bound(n);
    xs.push_back(row.key);
    ys.push_back(row.bound_total);
    out.rows.push_back(row);
  }
  out.slope = loglog_slope(xs, ys);
  return out;
}

RateSweep rate_sweep(const ParametricModel& model, const Vector& theta0, int r,
                     const TestFunction& h, std::span<const std::size_t> n_grid,
                     const BoundOptions& options) {
  return rate_sweep([&](std::size_t n) { return assemble_bound(model, theta0, n, r, h, options).total; },
                    n_grid);
}

std::vector<SweepRow> dimension_sweep(std::span<const int> d_grid, const TestFunction& h,
                                      const DimensionSweepOptions& options) {
  if (d_grid.empty()) throw ConfigError("dimension sweep needs a nonempty d grid");
  std::vector<SweepRow> rows;
  for (int d : d_grid) {
    if (d < 1) throw ConfigError("dimension sweep needs d >= 1");
    const double n = static_cast<double>(options.n);
    SweepRow row;
    row.key = d;
    row.bound_total = logistic_bound_scaling(d, d, n, options.caps).bound_order;
    if (options.simulate) {
      const LogisticModel model(d, options.caps.mu3 == 1.0 ? CovariateLaw::rademacher
                                                           : CovariateLaw::normal);
      const Vector theta0 = Vector::Zero(d);
      const SimulationResult sim = simulate_statistics(model, theta0, options.n, d, options.reps,
                                                       options.master_seed, options.threads);
      row.mc = distance_from_statistics(sim.statistics, h, d, options.master_seed);
      row.chisq_ref = row.mc->reference;
      row.ks = ks_distance_chisq(sim.statistics, d);
    }
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "key,bound_total,mc_mean,mc_stderr,chisq_ref,ks\n";
  for (const SweepRow& r : rows) {
    out << fmt(r.key) << ',' << fmt(r.bound_total) << ',';
    out << (r.mc ? fmt(r.mc->mean) : "") << ',' << (r.mc ? fmt(r.mc->stderr_) : "") << ',';
    out << (r.chisq_ref ? fmt(*r.chisq_ref) : "") << ',' << (r.ks ? fmt(*r.ks) : "") << '\n';
  }
}

}  // namespace stein_wilks
