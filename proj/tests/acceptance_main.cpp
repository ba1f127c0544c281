// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 on any failure.
// Usage: acceptance [--only 1,4,9]

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

#include "stein_wilks/acceptance.hpp"

int main(int argc, char** argv) {
  stein_wilks::AcceptanceOptions options;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--only") {
      std::stringstream ss(argv[i + 1]);
      std::string item;
      while (std::getline(ss, item, ',')) options.only.push_back(std::stoi(item));
    }
  }
  const auto results = stein_wilks::run_acceptance(options);
  stein_wilks::print_results(std::cout, results);
  for (const auto& r : results)
    if (!r.passed) return 1;
  return results.empty() ? 1 : 0;
}
