#pragma once

#include <cstddef>
#include <functional>

namespace nvac {

// Worker count: NVAC_WORKERS environment variable when set (>= 1), otherwise
// hardware concurrency.
int worker_count();

// Runs fn(i) for i in [0, n) on the worker pool. Work items must be
// independent; results are typically written to index i of a preallocated
// buffer, so aggregation order does not matter. Serial for small n or a
// single worker. Exceptions from workers are rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace nvac
