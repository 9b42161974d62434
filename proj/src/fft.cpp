#include "vexp/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <vector>

#include "vexp/errors.hpp"

namespace vexp {
namespace {

// Plans are made once per (shape, direction) on fftw_malloc buffers and then
// executed on other fftw_malloc buffers with the new-array interface, which
// keeps the codelet choice (and so the rounding) independent of where the
// caller's data lives.
struct PlanCache {
  std::mutex mutex;
  std::map<std::pair<std::vector<int>, bool>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }

  fftw_plan get(const std::vector<int>& dims, bool inverse, std::size_t total) {
    std::lock_guard lock(mutex);
    auto key = std::make_pair(dims, inverse);
    if (auto it = plans.find(key); it != plans.end()) return it->second;
    auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
    fftw_plan plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf,
                                   inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_free(buf);
    if (!plan) throw Error("fftw plan creation failed");
    plans.emplace(key, plan);
    return plan;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void fft_inplace(std::span<std::complex<double>> data, std::span<const int> dims, bool inverse) {
  const std::size_t total =
      std::accumulate(dims.begin(), dims.end(), std::size_t{1}, [](std::size_t a, int d) { return a * d; });
  if (total != data.size()) throw InputError("fft: data length does not match dimensions");
  if (total == 0) return;
  std::vector<int> shape(dims.begin(), dims.end());
  fftw_plan plan = cache().get(shape, inverse, total);
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
  std::memcpy(buf, data.data(), sizeof(fftw_complex) * total);
  fftw_execute_dft(plan, buf, buf);
  std::memcpy(static_cast<void*>(data.data()), buf, sizeof(fftw_complex) * total);
  fftw_free(buf);
}

}  // namespace vexp
