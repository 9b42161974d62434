#include <atomic>
#include <cstdlib>
#include <string_view>

#include "simd/kernels_internal.hpp"
#include "vexp/simd.hpp"

namespace vexp::simd {
namespace {

bool cpu_has_avx2() {
#if defined(VEXP_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_choice() {
  if (const char* env = std::getenv("VEXP_SIMD"); env && std::string_view(env) == "scalar") return &scalar_kernels();
  if (const KernelTable* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_choice()};
  return table;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable* avx2_kernels() {
#if defined(VEXP_HAVE_AVX2)
  static const bool ok = cpu_has_avx2();
  return ok ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

Isa select(Isa isa) {
  const KernelTable* t = &scalar_kernels();
  if (isa == Isa::Avx2 && avx2_kernels()) t = avx2_kernels();
  current().store(t, std::memory_order_release);
  return t->isa;
}

}  // namespace vexp::simd
