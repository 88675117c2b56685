#pragma once

#include <cstddef>
#include <functional>

namespace kobacore {

/// Worker count: KOBACORE_THREADS when set to a positive integer, else the
/// hardware concurrency (at least 1).
int worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Results
/// must be written to per-index slots; the first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace kobacore
