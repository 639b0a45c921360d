#pragma once

#include <cstddef>
#include <functional>

namespace delaywave {

/// Worker count: DELAYWAVE_THREADS when set to a positive integer, else the
/// hardware concurrency (at least 1).
int worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads. If any
/// call throws, the exception of the lowest failing index is rethrown after
/// all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace delaywave
