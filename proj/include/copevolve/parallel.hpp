#pragma once

#include <cstddef>
#include <functional>

namespace copevolve {

/// Worker cap from COPEVOLVE_THREADS; 0 or unset means all hardware threads.
std::size_t worker_count();

/// Runs fn(0..count-1) on up to `workers` threads. The first exception thrown by
/// any task is rethrown on the calling thread after all workers have joined.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

} // namespace copevolve
