#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "stein_wilks/bound.hpp"
#include "stein_wilks/model.hpp"

namespace stein_wilks {

struct MCEstimate {
  double mean = 0.0;    // |mean h(statistic) - E h(chi^2_r)|
  double stderr_ = 0.0; // standard error of the Monte Carlo mean
  std::size_t reps = 0;
  std::uint64_t master_seed = 0;
  std::size_t failed_reps = 0;
  double mc_expectation = 0.0;  // mean h(statistic)
  double reference = 0.0;       // E h(chi^2_r)
};

// E h(K), K ~ chi^2_r, by Gauss-Kronrod quadrature with x = u^2 on [0, 1].
double chisq_expectation(const TestFunction& h, int r);

// Distance estimate from already simulated statistics (NaN = failed fit).
MCEstimate distance_from_statistics(std::span<const double> statistics, const TestFunction& h,
                                    int r, std::uint64_t master_seed);

MCEstimate estimate_distance(const ParametricModel& model, const Vector& theta0, std::size_t n,
                             int r, const TestFunction& h, std::size_t reps,
                             std::uint64_t master_seed, int threads = 0);

// Kolmogorov-Smirnov distance of the finite entries of `sample` to chi^2_r.
double ks_distance_chisq(std::span<const double> sample, int r);

double wilks_ks_check(const ParametricModel& model, const Vector& theta0, std::size_t n, int r,
                      std::size_t reps, std::uint64_t master_seed, int threads = 0);

struct SweepRow {
  double key = 0.0;  // n or d
  double bound_total = 0.0;
  std::optional<MCEstimate> mc;
  std::optional<double> chisq_ref;
  std::optional<double> ks;
};

struct RateSweep {
  std::vector<SweepRow> rows;
  double slope = 0.0;  // least-squares slope of log bound against log n
};

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

RateSweep rate_sweep(const std::function<double(std::size_t)>& bound,
                     std::span<const std::size_t> n_grid);
RateSweep rate_sweep(const ParametricModel& model, const Vector& theta0, int r,
                     const TestFunction& h, std::span<const std::size_t> n_grid,
                     const BoundOptions& options = {});

struct DimensionSweepOptions {
  std::size_t n = 2000;
  std::size_t reps = 10000;
  std::uint64_t master_seed = 42;
  int threads = 0;
  MomentCaps caps = MomentCaps::rademacher();
  bool simulate = true;  // false: bound columns only
};

// Logistic regression under the simple null theta0 = 0 (r = d) for each d.
// bound_total is the order-level coefficient / sqrt(n).
std::vector<SweepRow> dimension_sweep(std::span<const int> d_grid, const TestFunction& h,
                                      const DimensionSweepOptions& options);

// Columns: key, bound_total, mc_mean, mc_stderr, chisq_ref, ks (absent fields empty).
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace stein_wilks
