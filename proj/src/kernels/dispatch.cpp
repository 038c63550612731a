#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace capcov::kernels {

const KernelTable& scalar_table() { return detail::kScalarTable; }

const KernelTable* avx2_table() {
#if defined(CAPCOV_HAVE_AVX2_TU)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &detail::kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable* table = [] {
    const char* env = std::getenv("CAPCOV_KERNELS");
    if (env != nullptr && std::string_view(env) == "scalar") {
      return &detail::kScalarTable;
    }
    const KernelTable* fast = avx2_table();
    return fast != nullptr ? fast : &detail::kScalarTable;
  }();
  return *table;
}

}  // namespace capcov::kernels
