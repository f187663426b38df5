#pragma once

#include <cstddef>
#include <functional>

namespace qspike {

/// Worker count: QSPIKE_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t thread_count();

/// Calls fn(i) for i in [0, n), split into contiguous chunks across up to
/// thread_count() threads. Callers write results into per-index slots so the
/// outcome does not depend on scheduling. The first exception thrown by any
/// chunk is rethrown after all threads join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace qspike
