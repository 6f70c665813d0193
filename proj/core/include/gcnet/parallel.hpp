#pragma once

#include <cstddef>
#include <functional>

namespace gcnet {

// Default thread budget: GCNET_THREADS environment variable if set and
// positive, otherwise std::thread::hardware_concurrency().
int default_thread_budget();

// Runs fn(i) for i in [0, n). With budget <= 1 the loop is serial; otherwise
// indices are distributed over min(budget, n) workers pulling from a shared
// counter. Work items must write only to their own output slots, which makes
// results independent of scheduling. The first exception thrown by any worker
// is rethrown on the calling thread after all workers join.
void parallel_for(std::size_t n, int budget, const std::function<void(std::size_t)>& fn);

}  // namespace gcnet
