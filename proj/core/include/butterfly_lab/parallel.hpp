#pragma once

#include <cstddef>
#include <functional>

namespace butterfly_lab {

// Worker count: hardware concurrency, capped by BUTTERFLY_LAB_THREADS when set and positive.
int thread_budget();

// Runs body(i) for i in [0, n) on up to `threads` workers (0 = thread_budget()).
// Indices are claimed dynamically; callers write results to slot i so the outcome
// does not depend on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int threads = 0);

}  // namespace butterfly_lab
