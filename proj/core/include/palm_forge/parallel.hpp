#pragma once

#include <cstddef>
#include <functional>

namespace palm_forge {

/// Worker count: PALM_FORGE_THREADS when set to a positive integer,
/// otherwise the number of logical cores.
unsigned worker_count();

/// Runs body(i) for i in [0, n) over the worker pool. Each index is handled
/// exactly once; callers write into index-addressed slots, which keeps the
/// output order independent of scheduling. The first exception thrown by
/// any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace palm_forge
