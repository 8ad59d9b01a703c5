#ifndef GENRCT_PARALLEL_HPP
#define GENRCT_PARALLEL_HPP

#include <cstdint>
#include <functional>

namespace genrct {

// Counter-based stream seeding: replicate r of a run seeded with `seed` draws
// from an RNG seeded with derive_seed(seed, r). Results are therefore
// independent of how replicates are distributed over worker threads.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = hardware
// concurrency). Tasks must write only to per-index slots; the first exception
// thrown by any task is rethrown on the calling thread after all workers join.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

int resolve_thread_count(int requested);

}  // namespace genrct

#endif  // GENRCT_PARALLEL_HPP
