#pragma once

#include <cstddef>
#include <functional>

namespace tsg {

/// Worker count from TSG_THREADS, falling back to hardware concurrency.
std::size_t worker_count();

/// Runs body(k) for k in [0, n) on up to worker_count() threads. Each index
/// is handled by exactly one call, so writes to per-index slots are race-free
/// and results do not depend on the thread count. The first exception thrown
/// (lowest index) is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace tsg
