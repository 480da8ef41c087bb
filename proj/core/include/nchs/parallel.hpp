#pragma once

#include <functional>

namespace nchs {

/// Worker count for independent probes: NCHS_THREADS if set and positive, otherwise the
/// hardware concurrency (at least 1).
int thread_count();

/// Runs body(0..n-1) on up to thread_count() threads. The first exception thrown by any
/// task is rethrown after all workers have joined.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace nchs
