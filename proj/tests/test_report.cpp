#include "doctest.h"

#include <sstream>

#include "stein_wilks/models.hpp"
#include "stein_wilks/report.hpp"

using namespace stein_wilks;

TEST_CASE("bound JSON schema") {
  const BoundBreakdown b = assemble_bound(ExponentialModel(), Vector::Constant(1, 3.0), 100000, 1, TestFunction::ht());
  const nlohmann::json j = bound_to_json(b);
  for (const char* key : {"meta", "terms", "total", "certified", "uncertainty"}) CHECK(j.contains(key));
  CHECK(j.size() == 5);
  for (const char* key : {"r", "k1", "k1_star", "k2", "k2_star"}) CHECK(j["terms"].contains(key));
  CHECK(j["terms"].size() == 5);
  CHECK(j["total"].get<double>() == b.total);
  CHECK(j["meta"]["model"] == "exponential");
  // Full precision survives a round trip.
  CHECK(nlohmann::json::parse(j.dump())["total"].get<double>() == b.total);
}

TEST_CASE("estimate JSON and simulation report") {
  MCEstimate e;
  e.mean = 1e-3;
  e.stderr_ = 2e-4;
  e.reps = 10000;
  e.master_seed = 42;
  const nlohmann::json j = estimate_to_json(e);
  CHECK(j["stderr"].get<double>() == 2e-4);
  CHECK(j["master_seed"].get<std::uint64_t>() == 42);
  CHECK_FALSE(simulation_to_json(e, std::nullopt).contains("bound"));
  BoundBreakdown b;
  b.total = 1.0;
  CHECK(simulation_to_json(e, b)["within_bound"].get<bool>());
}

TEST_CASE("text table rounds to three decimals") {
  BoundBreakdown b;
  b.r_term = 0.0028340265;
  b.k1_term = 0.0075823820;
  b.k2_term = 1.2044471649;
  b.total = 1.2148635735;
  std::ostringstream os;
  write_bound_table(os, b);
  const std::string s = os.str();
  CHECK(s.find("total                   1.215\n") != std::string::npos);
  CHECK(s.find("k1_term                 0.008\n") != std::string::npos);
  CHECK(s.find("certified                 yes\n") != std::string::npos);
}
