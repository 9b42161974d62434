#include "vexp/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace vexp {
namespace {
std::atomic<int> g_threads{1};
}

int thread_count() noexcept { return g_threads.load(); }

void set_thread_count(int n) { g_threads.store(std::max(1, n)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::min<std::size_t>(thread_count(), std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    fn(0, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t b = w * chunk;
      const std::size_t e = std::min(n, b + chunk);
      if (b >= e) break;
      pool.emplace_back([&, w, b, e] {
        try {
          fn(b, e);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

}  // namespace vexp
