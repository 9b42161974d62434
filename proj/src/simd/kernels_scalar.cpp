#include <algorithm>
#include <cmath>

#include "vexp/simd.hpp"

namespace vexp::simd {
namespace {

double sum_scalar(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

double exp_sum_scalar(std::span<const double> log_abs, std::span<const double> p, double shift) {
  double s = 0.0;
  for (std::size_t i = 0; i < log_abs.size(); ++i) {
    if (log_abs[i] == -HUGE_VAL) continue;
    s += std::exp(p[i] * (log_abs[i] - shift));
  }
  return s;
}

void exp_scalar(std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::exp(x[i]);
}

void window_mean_scalar(std::span<const double> prefix, std::span<double> out, int radius) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
  const double inv_full = 1.0 / (2.0 * radius + 1.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(i - radius, 0);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(i + radius + 1, n);
    const double diff = prefix[hi] - prefix[lo];
    out[i] = (hi - lo == 2 * radius + 1) ? diff * inv_full : diff / static_cast<double>(hi - lo);
  }
}

void max_inplace_scalar(std::span<double> dst, std::span<const double> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::max(dst[i], src[i]);
}

void axpy_scalar(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      Isa::Scalar, sum_scalar, exp_sum_scalar, exp_scalar, window_mean_scalar, max_inplace_scalar, axpy_scalar,
  };
  return table;
}

}  // namespace vexp::simd
