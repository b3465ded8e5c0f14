#pragma once

#include <functional>

namespace sweptnet {

// Process-wide worker count for data-parallel loops. 1 disables threading;
// 0 resets to the hardware default.
void set_thread_count(int n);
int thread_count();

// Runs fn(begin, end) over a fixed contiguous partition of [0, n) with
// thread_count() workers. Items must be independent; because the work per
// item does not depend on the partition, results are identical for any
// worker count.
void parallel_for(long n, const std::function<void(long, long)>& fn);

}  // namespace sweptnet
