#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>

#include <omp.h>

namespace stein_wilks {

// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based per-replicate seed: a pure function of (master, index), so a
// replicate draws the same stream whichever worker runs it.
constexpr std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

// Worker count: OpenMP's maximum, capped by STEIN_WILKS_THREADS when set.
int worker_count();

// Resolves a requested thread count (0 = worker_count()).
inline int resolve_threads(int requested) { return requested > 0 ? requested : worker_count(); }

// Runs body(i, state) for i in [0, count) on `threads` workers. Each worker
// owns one State instance (built by make_state()). Results must be written to
// index-addressed storage so the outcome does not depend on scheduling. The
// first exception thrown by any replicate is rethrown after the loop.
template <class MakeState, class Body>
void parallel_replicates(std::size_t count, int threads, MakeState&& make_state, Body&& body) {
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto total = static_cast<long long>(count);
#pragma omp parallel num_threads(resolve_threads(threads))
  {
    auto state = make_state();
#pragma omp for schedule(dynamic, 64)
    for (long long i = 0; i < total; ++i) {
      try {
        body(static_cast<std::size_t>(i), state);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
}

// Replicates are grouped into fixed-size blocks; per-block accumulators are
// merged in block order, so reductions do not depend on the worker count.
inline constexpr std::size_t kBlockSize = 512;

inline std::size_t block_count(std::size_t reps) { return (reps + kBlockSize - 1) / kBlockSize; }

// Serial reference for parallel_replicates.
template <class MakeState, class Body>
void serial_replicates(std::size_t count, MakeState&& make_state, Body&& body) {
  auto state = make_state();
  for (std::size_t i = 0; i < count; ++i) body(i, state);
}

}  // namespace stein_wilks
