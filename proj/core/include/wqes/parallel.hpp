#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace wqes {

// Per-task seed for parallel work units: seed xor index, whitened through a
// splitmix64 round so nearby indices give unrelated generator states.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// Worker count to use: requested, or hardware concurrency when requested == 0.
// The WQES_WORKERS environment variable, when set, overrides both.
unsigned resolve_workers(unsigned requested);

// Runs fn(i) for i in [0, n). Work is pulled from a shared atomic counter, so
// callers must write results into per-index slots; with that discipline the
// outcome is identical for any worker count. The first exception thrown by
// any fn is rethrown on the calling thread after all workers join.
void parallel_for(std::size_t n, unsigned workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace wqes
