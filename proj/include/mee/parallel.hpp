#pragma once

#include <cstddef>
#include <functional>

namespace mee {

/// Worker cap: MEE_THREADS if set (>= 1), otherwise hardware concurrency.
std::size_t worker_count();
/// Overrides the worker cap for this process (0 restores the default).
void set_worker_count(std::size_t n);

/// Runs body(i) for i in [0, count). Tasks are statically chunked across
/// workers; calls made from inside a running parallel_for execute serially,
/// so nesting never oversubscribes. Results must be written to per-task
/// slots by the caller; reductions happen afterwards in index order.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace mee
