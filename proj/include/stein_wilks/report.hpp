#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

#include "stein_wilks/bound.hpp"
#include "stein_wilks/mc.hpp"

namespace stein_wilks {

// {meta, terms:{r,k1,k1_star,k2,k2_star}, total, certified, uncertainty}
nlohmann::json bound_to_json(const BoundBreakdown& b);
nlohmann::json estimate_to_json(const MCEstimate& e);

// Simulation report; `bound` is included for comparison when available.
nlohmann::json simulation_to_json(const MCEstimate& e, const std::optional<BoundBreakdown>& bound);

// Aligned two-column table, values rounded to 3 decimals.
void write_bound_table(std::ostream& out, const BoundBreakdown& b);

}  // namespace stein_wilks
