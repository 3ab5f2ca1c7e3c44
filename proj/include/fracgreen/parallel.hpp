#pragma once
#include <cstddef>
#include <functional>

namespace fracgreen {

// Hardware concurrency capped by FRACGREEN_THREADS.
int thread_count();

// Calls fn(i) for i in [0, n) on up to thread_count() threads. Work is
// handed out by index, so results written per index are deterministic.
// The first exception thrown is rethrown after all threads join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace fracgreen
