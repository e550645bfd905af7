#pragma once

#include <functional>

namespace ibflow {

/// Worker count: min(hardware, IBFLOW_THREADS) with a floor of 1.
int worker_count();

/// Static-partition parallel for over [begin, end). Each index is visited
/// exactly once; results written to disjoint slots are deterministic
/// regardless of worker count.
void parallel_for(int begin, int end, const std::function<void(int)>& body);

} // namespace ibflow
