#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "stein_wilks/model.hpp"

namespace stein_wilks {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::vector<int> only;  // empty: all nine criteria
  int threads = 0;
  std::uint64_t seed = 42;
};

// One entry of a moment-table comparison against an independent Monte Carlo estimate.
struct MomentCheck {
  std::string table;
  std::vector<std::size_t> index;
  double analytic = 0.0;
  bool upper_bound = false;
  double mc = 0.0;
  double stderr_ = 0.0;
  bool passed = false;
};

// Compares every analytic entry of model.moment_oracle(theta0, r, n, eps)
// with `draws` simulated datasets. Exact entries must agree within 5 standard
// errors; upper bounds must satisfy mc <= bound + 5 se.
std::vector<MomentCheck> check_moment_oracle(const ParametricModel& model, const Vector& theta0,
                                             int r, std::size_t n, double eps, std::size_t draws,
                                             std::uint64_t seed, int threads = 0);

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

// "PASS  3  name  (detail)  [1.23 s]" per criterion.
void print_results(std::ostream& out, const std::vector<CriterionResult>& results);

}  // namespace stein_wilks
