#pragma once

#include <cstddef>
#include <functional>

namespace periorbital {

// Worker count: PERIORBITAL_THREADS when set to a positive integer,
// otherwise the hardware concurrency (at least 1).
unsigned default_thread_count();

// Runs fn(i) for i in [0, n). Work is claimed dynamically, so callers must
// write results by index to stay independent of scheduling. threads == 0
// means default_thread_count(). The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned threads = 0);

}  // namespace periorbital
