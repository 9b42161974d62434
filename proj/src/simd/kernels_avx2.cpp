// Compiled with -mavx2 -mfma; only reached through the runtime dispatch in
// dispatch.cpp after a CPUID check.
#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "simd/kernels_internal.hpp"
#include "vexp/simd.hpp"

namespace vexp::simd {
namespace {

constexpr std::size_t kLanes = 4;

// exp(x) with |error| <= 2 ulp on normal results. Inputs below the smallest
// normal result (including -inf) give 0, inputs above log(DBL_MAX) give +inf.
inline __m256d exp_pd(__m256d x) {
  const __m256d hi = _mm256_set1_pd(709.782712893384);
  const __m256d lo = _mm256_set1_pd(-708.3964185322641);
  const __m256d over = _mm256_cmp_pd(x, hi, _CMP_GT_OQ);
  const __m256d under = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93147180369123816490e-01), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.90821492927058770002e-10), r);

  // Taylor polynomial to degree 13 on |r| <= ln2/2.
  __m256d poly = _mm256_set1_pd(1.0 / 6227020800.0);
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 479001600.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 39916800.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 3628800.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 362880.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 40320.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 5040.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 720.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 120.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 24.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 6.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(0.5));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0));

  // 2^n split in two factors so n = 1024 and n = -1022 stay representable.
  const __m128i n32 = _mm256_cvtpd_epi32(n);
  const __m128i n1 = _mm_srai_epi32(n32, 1);
  const __m128i n2 = _mm_sub_epi32(n32, n1);
  const __m256i bias = _mm256_set1_epi64x(1023);
  const __m256d s1 = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(n1), bias), 52));
  const __m256d s2 = _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(n2), bias), 52));
  __m256d result = _mm256_mul_pd(_mm256_mul_pd(poly, s1), s2);

  result = _mm256_blendv_pd(result, _mm256_set1_pd(std::numeric_limits<double>::infinity()), over);
  result = _mm256_blendv_pd(result, _mm256_setzero_pd(), under);
  return result;
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum_avx2(std::span<const double> x) {
  const double* p = x.data();
  const std::size_t n = x.size();
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(p + i));
    a1 = _mm256_add_pd(a1, _mm256_loadu_pd(p + i + kLanes));
  }
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += p[i];
  return s;
}

double exp_sum_avx2(std::span<const double> log_abs, std::span<const double> p, double shift) {
  const std::size_t n = log_abs.size();
  const __m256d vshift = _mm256_set1_pd(shift);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d a = _mm256_loadu_pd(log_abs.data() + i);
    const __m256d e = _mm256_loadu_pd(p.data() + i);
    // -inf - shift stays -inf and p > 0, so zero samples map below the underflow cut.
    acc = _mm256_add_pd(acc, exp_pd(_mm256_mul_pd(e, _mm256_sub_pd(a, vshift))));
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    if (log_abs[i] == -HUGE_VAL) continue;
    s += std::exp(p[i] * (log_abs[i] - shift));
  }
  return s;
}

void exp_avx2(std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) _mm256_storeu_pd(y.data() + i, exp_pd(_mm256_loadu_pd(x.data() + i)));
  for (; i < n; ++i) y[i] = std::exp(x[i]);
}

void window_mean_avx2(std::span<const double> prefix, std::span<double> out, int radius) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
  const double inv_full = 1.0 / (2.0 * radius + 1.0);
  auto edge = [&](std::ptrdiff_t i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(i - radius, 0);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(i + radius + 1, n);
    const double diff = prefix[hi] - prefix[lo];
    out[i] = (hi - lo == 2 * radius + 1) ? diff * inv_full : diff / static_cast<double>(hi - lo);
  };
  const std::ptrdiff_t first = std::min<std::ptrdiff_t>(radius, n);
  const std::ptrdiff_t last = std::max<std::ptrdiff_t>(first, n - radius);  // exclusive end of interior
  std::ptrdiff_t i = 0;
  for (; i < first; ++i) edge(i);
  const __m256d vinv = _mm256_set1_pd(inv_full);
  for (; i + static_cast<std::ptrdiff_t>(kLanes) <= last; i += kLanes) {
    const __m256d hi = _mm256_loadu_pd(prefix.data() + i + radius + 1);
    const __m256d lo = _mm256_loadu_pd(prefix.data() + i - radius);
    _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(_mm256_sub_pd(hi, lo), vinv));
  }
  for (; i < n; ++i) edge(i);
}

void max_inplace_avx2(std::span<double> dst, std::span<const double> src) {
  const std::size_t n = dst.size();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d a = _mm256_loadu_pd(dst.data() + i);
    const __m256d b = _mm256_loadu_pd(src.data() + i);
    // max_pd returns the second operand on ties/NaN; order matches std::max(a, b).
    _mm256_storeu_pd(dst.data() + i, _mm256_max_pd(b, a));
  }
  for (; i < n; ++i) dst[i] = std::max(dst[i], src[i]);
}

void axpy_avx2(double a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = y.size();
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d vy = _mm256_loadu_pd(y.data() + i);
    _mm256_storeu_pd(y.data() + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x.data() + i), vy));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

}  // namespace

namespace detail {

const KernelTable& avx2_table() {
  static const KernelTable table{
      Isa::Avx2, sum_avx2, exp_sum_avx2, exp_avx2, window_mean_avx2, max_inplace_avx2, axpy_avx2,
  };
  return table;
}

}  // namespace detail
}  // namespace vexp::simd
