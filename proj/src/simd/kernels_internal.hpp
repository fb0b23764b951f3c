#pragma once

#include "echomod/simd.hpp"

namespace echomod::simd::detail {

const Kernels& scalar_kernels();
#if defined(__x86_64__) || defined(_M_X64)
const Kernels& avx2_kernels();
#endif
#if defined(__aarch64__)
const Kernels& neon_kernels();
#endif

}  // namespace echomod::simd::detail
