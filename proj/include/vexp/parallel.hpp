#pragma once

#include <cstddef>
#include <functional>

namespace vexp {

/// Number of worker threads used by parallel_for; defaults to 1.
int thread_count() noexcept;
void set_thread_count(int n);

/// Calls fn(begin, end) on disjoint chunks covering [0, n). Chunks are fixed
/// by n and the thread count, so results that depend only on the index are
/// independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace vexp
