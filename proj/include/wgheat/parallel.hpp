// parallel.hpp — Index-parallel map over a fixed thread pool size

#pragma once

#include <cstddef>
#include <functional>

namespace wgheat {

// Thread count from WGHEAT_THREADS, else hardware concurrency (at least 1).
unsigned thread_count();
void set_thread_count(unsigned n); // 0 restores the default

// Calls f(i) for i in [0, n). Work items are claimed dynamically; results
// must be written to per-index slots so the outcome is independent of the
// thread count. The first exception thrown is rethrown after joining.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

} // namespace wgheat
