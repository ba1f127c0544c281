#include "stein_wilks/report.hpp"

#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace stein_wilks {

nlohmann::json bound_to_json(const BoundBreakdown& b) {
  const BoundMeta& m = b.meta;
  nlohmann::json meta = {
      {"model", m.model_id},
      {"theta0", m.theta0},
      {"n", m.n},
      {"r", m.r},
      {"d", m.d},
      {"epsilon", m.epsilon},
      {"norms", {{"h", m.norm_h}, {"h1", m.norm_h1}, {"h2", m.norm_h2}}},
      {"c", m.c},
      {"constants", {{"R", m.R}, {"K1", m.K1}, {"K1_star", m.K1_star}, {"K2", m.K2},
                     {"K2_star", m.K2_star}}},
  };
  return {
      {"meta", std::move(meta)},
      {"terms",
       {{"r", b.r_term}, {"k1", b.k1_term}, {"k1_star", b.k1_star_term}, {"k2", b.k2_term},
        {"k2_star", b.k2_star_term}}},
      {"total", b.total},
      {"certified", b.certified},
      {"uncertainty", b.uncertainty},
  };
}

nlohmann::json estimate_to_json(const MCEstimate& e) {
  return {
      {"mean", e.mean},
      {"stderr", e.stderr_},
      {"reps", e.reps},
      {"master_seed", e.master_seed},
      {"failed_reps", e.failed_reps},
      {"mc_expectation", e.mc_expectation},
      {"chisq_ref", e.reference},
  };
}

nlohmann::json simulation_to_json(const MCEstimate& e, const std::optional<BoundBreakdown>& bound) {
  nlohmann::json j = {{"mc_distance", estimate_to_json(e)}};
  if (bound) {
    j["bound"] = bound_to_json(*bound);
    j["within_bound"] = e.mean + 3.0 * e.stderr_ <= bound->total;
  }
  return j;
}

void write_bound_table(std::ostream& out, const BoundBreakdown& b) {
  const std::vector<std::pair<std::string, double>> rows = {
      {"r_term", b.r_term},        {"k1_term", b.k1_term}, {"k1_star_term", b.k1_star_term},
      {"k2_term", b.k2_term},      {"k2_star_term", b.k2_star_term},
      {"total", b.total},          {"uncertainty", b.uncertainty},
  };
  char line[96];
  std::snprintf(line, sizeof line, "%-14s %14s\n", "term", "value");
  out << line;
  for (const auto& [name, v] : rows) {
    std::snprintf(line, sizeof line, "%-14s %14.3f\n", name.c_str(), v);
    out << line;
  }
  std::snprintf(line, sizeof line, "%-14s %14s\n", "certified", b.certified ? "yes" : "no");
  out << line;
}

}  // namespace stein_wilks
