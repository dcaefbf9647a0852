#pragma once

#include "tclsim/kernels.hpp"

namespace tclsim::kernels {

#if defined(TCLSIM_HAVE_AVX2)
const KernelTable& avx2_table_unchecked();
#endif

}  // namespace tclsim::kernels
