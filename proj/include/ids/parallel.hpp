#pragma once

#include <cstddef>
#include <functional>

namespace ids {

// Worker count used by realization-level loops. Defaults to $IDS_WORKERS,
// else 1.
int worker_count();
void set_worker_count(int workers);

// Runs body(i) for i in [0, n) on the worker pool. Each index must write only
// its own output slot; reductions happen afterwards in index order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ids
