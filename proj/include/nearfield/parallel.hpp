// parallel.hpp — index-parallel loops for grid sweeps and particle ensembles

#pragma once

#include <cstddef>
#include <functional>

namespace nearfield {

/// Worker count: NEARFIELD_THREADS if set and positive, else the hardware concurrency.
unsigned thread_count();

/// Runs body(i) for i in [0, n) on up to thread_count() threads. Each index is
/// handled exactly once; the first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace nearfield
