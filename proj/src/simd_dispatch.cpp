#include "sitemap/simd_kernels.hpp"

namespace sitemap::simd {

// Lives outside the AVX2-flagged translation unit so the probe itself never
// executes vector instructions.
bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelSet& active_kernels() {
    static const KernelSet& chosen = avx2_available() ? avx2_kernels() : scalar_kernels();
    return chosen;
}

} // namespace sitemap::simd
