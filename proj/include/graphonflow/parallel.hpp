#pragma once

#include <cstddef>
#include <functional>

namespace gf {

// Number of worker threads: min(hardware, GRAPHONFLOW_THREADS if set).
int thread_count();

// Runs fn(i) for i in [0, n). Work is split into contiguous chunks; results
// must be written to disjoint slots so the merge order is deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace gf
