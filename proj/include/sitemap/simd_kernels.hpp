#pragma once

#include <cstddef>

namespace sitemap::simd {

// Elementwise kernels behind the batched Gaussian-process sweep. All loops
// run over contiguous arrays of doubles with identical iteration order in
// every variant, so scalar and vector implementations agree to rounding.
// exp_scale permits dst == src; the others require non-overlapping arrays.
struct KernelSet {
    const char* name;
    // dst[i] += a * src[i]
    void (*axpy)(double* dst, const double* src, double a, std::size_t n);
    // dst[i] *= a
    void (*scale)(double* dst, double a, std::size_t n);
    // acc[i] += (xs[i] - c)^2
    void (*sqdist_accum)(double* acc, const double* xs, double c, std::size_t n);
    // dst[i] -= src[i]^2
    void (*sub_square)(double* dst, const double* src, std::size_t n);
    // dst[i] = b * exp(a * src[i]); requires a <= 0 and src[i] >= 0
    void (*exp_scale)(double* dst, const double* src, double a, double b, std::size_t n);
};

// Scalar reference implementation; always available.
const KernelSet& scalar_kernels();

// AVX2+FMA variant. Call only when avx2_available() is true.
const KernelSet& avx2_kernels();

bool avx2_available();

// Best variant for this machine, chosen once at first use.
const KernelSet& active_kernels();

} // namespace sitemap::simd
