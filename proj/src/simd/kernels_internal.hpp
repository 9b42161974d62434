#pragma once

#include "vexp/simd.hpp"

namespace vexp::simd::detail {

#if defined(VEXP_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

}  // namespace vexp::simd::detail
