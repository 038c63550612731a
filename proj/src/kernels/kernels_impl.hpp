#pragma once

#include "capcov/kernels.hpp"

namespace capcov::kernels::detail {

extern const KernelTable kScalarTable;
#if defined(CAPCOV_HAVE_AVX2_TU)
extern const KernelTable kAvx2Table;
#endif

}  // namespace capcov::kernels::detail
