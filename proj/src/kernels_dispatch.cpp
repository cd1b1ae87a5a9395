#include <cstdlib>
#include <string_view>

#include "franson/kernels.hpp"

namespace franson::kernels {

#if defined(FRANSON_BUILD_AVX2)
const KernelTable& avx2_table_impl();
#endif

const KernelTable* avx2_table() {
#if defined(FRANSON_BUILD_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& table = [] () -> const KernelTable& {
    const char* forced = std::getenv("FRANSON_SIMD");
    if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_table();
    if (const KernelTable* simd = avx2_table()) return *simd;
    return scalar_table();
  }();
  return table;
}

}  // namespace franson::kernels
