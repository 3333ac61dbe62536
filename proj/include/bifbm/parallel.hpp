#pragma once

#include <cstddef>
#include <functional>

namespace bifbm {

/// Worker count: BIFBM_THREADS when set (>= 1), otherwise hardware concurrency.
std::size_t worker_count();

/// Calls body(i) for i in [0, n) on up to worker_count() threads.
///
/// Indices are handed out in contiguous blocks; callers write results by index
/// and reduce afterwards in index order, so output never depends on the schedule.
/// The first exception thrown by any body is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace bifbm
