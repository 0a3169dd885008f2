#pragma once

#include <cstddef>
#include <functional>

namespace emspec {

// Worker count for parallel maps: EMSPEC_THREADS when set (positive integer,
// anything else is an error), otherwise the OpenMP default; 1 in serial builds.
int resolved_thread_count();

// Parallel map over [0, n): body(i) runs exactly once per index. Callers write
// results into per-index slots, so scheduling order can never change output.
// If any iteration throws, the exception from the smallest failing index is
// rethrown after the loop drains.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace emspec
