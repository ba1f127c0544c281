#pragma once

#include <span>
#include <vector>

#include "stein_wilks/moments.hpp"

namespace stein_wilks::detail {

// Per-coordinate multiplicities of an index tuple.
inline std::vector<int> multiplicities(std::span<const std::size_t> idx, std::size_t dim) {
  std::vector<int> m(dim, 0);
  for (std::size_t i : idx) ++m[i];
  return m;
}

// Fills a table whose entries depend only on index multiplicities.
template <class Fn>
void fill_by_counts(MomentTable& t, Fn&& fn) {
  t.fill([&](std::span<const std::size_t> idx) { return fn(multiplicities(idx, t.dim())); });
}

}  // namespace stein_wilks::detail
