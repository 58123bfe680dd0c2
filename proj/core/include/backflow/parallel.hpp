#pragma once

#include <cstddef>
#include <functional>

namespace backflow {

/// Worker count from BACKFLOW_THREADS (0 or unset = hardware concurrency).
std::size_t thread_count();

/// Runs body(i) for i in [0, n) across up to thread_count() threads.
/// Each index is visited exactly once; results must be written to
/// index-owned storage so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace backflow
