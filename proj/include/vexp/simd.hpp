#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace vexp::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

/// Data-parallel inner loops used by the norm, maximal and convolution code.
///
/// Every entry has a scalar reference implementation; vector variants must
/// agree with it to within a few ulps per element (sums may differ by the
/// reassociation error only).
struct KernelTable {
  Isa isa;

  double (*sum)(std::span<const double> x);

  /// sum_i exp(p_i * (log_abs_i - shift)); entries with log_abs_i = -inf contribute 0.
  double (*exp_sum)(std::span<const double> log_abs, std::span<const double> p, double shift);

  /// y_i = exp(x_i).
  void (*exp)(std::span<const double> x, std::span<double> y);

  /// Clipped window mean: out_i = (S[hi] - S[lo]) / (hi - lo) with
  /// lo = max(i - radius, 0), hi = min(i + radius + 1, n), where S is the
  /// exclusive prefix sum of length n + 1.
  void (*window_mean)(std::span<const double> prefix, std::span<double> out, int radius);

  /// dst_i = max(dst_i, src_i).
  void (*max_inplace)(std::span<double> dst, std::span<const double> src);

  /// y_i += a * x_i.
  void (*axpy)(double a, std::span<const double> x, std::span<double> y);
};

const KernelTable& scalar_kernels();

/// AVX2+FMA table, or nullptr when the binary was built without it or the CPU lacks it.
const KernelTable* avx2_kernels();

/// The table used by the library. Chosen once at first use: AVX2 when
/// available unless the environment variable VEXP_SIMD=scalar is set.
const KernelTable& active();

/// Overrides the runtime choice (tests, benchmarking). Falls back to scalar if
/// the requested ISA is unavailable; returns the ISA actually selected.
Isa select(Isa isa);

}  // namespace vexp::simd
