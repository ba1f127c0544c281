// Serial reference vs OpenMP kernel for LRT simulation.
// Usage: bench_kernels [reps] [n]

#include <chrono>
#include <memory>
#include <cstdio>
#include <cstdlib>

#include "stein_wilks/kernels.hpp"
#include "stein_wilks/models.hpp"
#include "stein_wilks/parallel.hpp"

namespace sw = stein_wilks;

template <class Fn>
double time_it(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int main(int argc, char** argv) {
  const std::size_t reps = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 20000;
  const std::size_t n = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1000;

  struct Case {
    const char* name;
    std::unique_ptr<sw::ParametricModel> model;
    sw::Vector theta0;
    int r;
    std::size_t reps_divisor;  // Newton fits are slower than closed forms
  };
  Case cases[3] = {{"exponential", std::make_unique<sw::ExponentialModel>(), sw::Vector::Constant(1, 3.0), 1, 1},
                   {"normal", std::make_unique<sw::NormalModel>(), sw::Vector(2), 1, 1},
                   {"logistic d=3", std::make_unique<sw::LogisticModel>(3), sw::Vector::Zero(3), 1, 10}};
  cases[1].theta0 << 0.0, 1.0;

  std::printf("workers %d, reps %zu, n %zu\n", sw::worker_count(), reps, n);
  std::printf("%-14s %10s %10s %8s %s\n", "model", "serial s", "omp s", "speedup", "identical");
  for (const Case& c : cases) {
    const std::size_t m = reps / c.reps_divisor;
    sw::SimulationResult a, b;
    const double ts = time_it([&] { a = sw::simulate_statistics_serial(*c.model, c.theta0, n, c.r, m, 42); });
    const double tp = time_it([&] { b = sw::simulate_statistics(*c.model, c.theta0, n, c.r, m, 42); });
    bool same = a.statistics.size() == b.statistics.size();
    for (std::size_t i = 0; same && i < a.statistics.size(); ++i) {
      same = a.statistics[i] == b.statistics[i] || (a.statistics[i] != a.statistics[i] && b.statistics[i] != b.statistics[i]);
    }
    std::printf("%-14s %10.3f %10.3f %8.2f %s\n", c.name, ts, tp, ts / tp, same ? "yes" : "no");
  }
  return 0;
}
