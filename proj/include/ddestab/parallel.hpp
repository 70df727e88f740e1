#pragma once

#include <cstddef>
#include <functional>

namespace ddestab {

/// Worker count for internal loops: DDESTAB_THREADS when set to a positive
/// integer, otherwise the hardware concurrency.
std::size_t worker_count();

/// Runs body(i) for i in [0, n). Each index is visited exactly once; results
/// written by index stay deterministic. The first exception thrown by any
/// worker is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ddestab
