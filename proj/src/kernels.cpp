#include "stein_wilks/kernels.hpp"

#include <cstdlib>
#include <limits>
#include <string>

#include "stein_wilks/lrt.hpp"
#include "stein_wilks/parallel.hpp"

namespace stein_wilks {

int worker_count() {
  int workers = omp_get_max_threads();
  if (const char* env = std::getenv("STEIN_WILKS_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) workers = std::min(workers, cap);
    } catch (const std::exception&) {
      throw ConfigError(std::string("STEIN_WILKS_THREADS is not an integer: ") + env);
    }
  }
  return std::max(workers, 1);
}

namespace {

double one_replicate(const ParametricModel& model, const Vector& theta0, std::size_t n, int r,
                     std::uint64_t master_seed, std::size_t i, Dataset& buf) {
  Rng rng(replicate_seed(master_seed, i));
  model.sample_into(theta0, n, rng, buf);
  try {
    return lrt_statistic(model, buf, r, theta0);
  } catch (const FitFailure&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

void check_inputs(const ParametricModel& model, const Vector& theta0, std::size_t n, int r) {
  if (theta0.size() != model.dim()) throw DimensionMismatch("theta0 has the wrong length");
  if (!model.in_domain(theta0)) throw ConfigError(model.id() + ": theta0 outside the domain");
  if (n < 1) throw ConfigError("simulation needs n >= 1");
  if (r < 1 || r > model.dim()) throw ConfigError("r must lie in [1, d]");
}

std::size_t count_failed(const std::vector<double>& s) {
  std::size_t f = 0;
  for (double v : s) f += v != v;
  return f;
}

}  // namespace

SimulationResult simulate_statistics(const ParametricModel& model, const Vector& theta0,
                                     std::size_t n, int r, std::size_t reps,
                                     std::uint64_t master_seed, int threads) {
  check_inputs(model, theta0, n, r);
  SimulationResult out;
  out.statistics.resize(reps);
  parallel_replicates(
      reps, threads, [] { return Dataset(); },
      [&](std::size_t i, Dataset& buf) {
        out.statistics[i] = one_replicate(model, theta0, n, r, master_seed, i, buf);
      });
  out.failed = count_failed(out.statistics);
  return out;
}

SimulationResult simulate_statistics_serial(const ParametricModel& model, const Vector& theta0,
                                            std::size_t n, int r, std::size_t reps,
                                            std::uint64_t master_seed) {
  check_inputs(model, theta0, n, r);
  SimulationResult out;
  out.statistics.resize(reps);
  serial_replicates(
      reps, [] { return Dataset(); },
      [&](std::size_t i, Dataset& buf) {
        out.statistics[i] = one_replicate(model, theta0, n, r, master_seed, i, buf);
      });
  out.failed = count_failed(out.statistics);
  return out;
}

}  // namespace stein_wilks
