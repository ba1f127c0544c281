#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stein_wilks/model.hpp"

namespace stein_wilks {

// Simulated -2 log Lambda values indexed by replicate; fit failures are NaN.
struct SimulationResult {
  std::vector<double> statistics;
  std::size_t failed = 0;
};

// Replicate i draws its data from replicate_seed(master_seed, i), so both
// versions return identical vectors for any worker count.
SimulationResult simulate_statistics(const ParametricModel& model, const Vector& theta0,
                                     std::size_t n, int r, std::size_t reps,
                                     std::uint64_t master_seed, int threads = 0);

SimulationResult simulate_statistics_serial(const ParametricModel& model, const Vector& theta0,
                                            std::size_t n, int r, std::size_t reps,
                                            std::uint64_t master_seed);

}  // namespace stein_wilks
