#pragma once

#include <atomic>
#include <cstddef>
#include <functional>

namespace pbb {

/// Worker count from the PBB_WORKERS environment variable, else the
/// hardware concurrency (at least 1).
int default_worker_count();

/// Calls task(i) for every i in [0, n) on up to `workers` threads. Work is
/// handed out by index; callers write results into per-index slots so the
/// assembled output does not depend on scheduling. When `cancel` becomes
/// true no new indices are started. Returns the number of tasks run. The
/// exception of the lowest failing index is rethrown after all threads join.
std::size_t parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& task,
                         const std::atomic<bool>* cancel = nullptr);

}  // namespace pbb
