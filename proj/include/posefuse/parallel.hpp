#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace posefuse {

/// Worker count from POSEFUSE_THREADS (0 or unset = hardware concurrency).
std::size_t default_thread_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunk boundaries
/// depend only on n and threads, and every index is visited exactly once, so
/// callers that write per-index results get scheduling-independent output.
/// threads == 0 uses default_thread_count(). The first exception thrown by a
/// chunk is rethrown on the calling thread after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t threads = 0);

/// Deterministic 64-bit generator with explicit distribution code, so seeded
/// streams are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::uint64_t state_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// splitmix64 mixing step; derives independent sub-seeds from (seed, stream).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace posefuse
