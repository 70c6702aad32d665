#pragma once

#include <cstddef>
#include <functional>

namespace eprc {

// Worker count for trial-level parallelism: hardware concurrency, capped by
// the EPR_CASCADE_THREADS environment variable when set. Always >= 1.
std::size_t resolve_thread_count();

// Runs body(i) for every i in [0, count) over num_threads contiguous chunks.
// Results are deterministic as long as body(i) writes only to slot i of any
// shared output. Exceptions from workers are rethrown on the calling thread.
void parallel_for(std::size_t count, std::size_t num_threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace eprc
