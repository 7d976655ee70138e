#include "sitemap/simd_kernels.hpp"

#include <cmath>

namespace sitemap::simd {
namespace {

void axpy_scalar(double* dst, const double* src, double a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += a * src[i];
}

void scale_scalar(double* dst, double a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] *= a;
}

void sqdist_accum_scalar(double* acc, const double* xs, double c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double d = xs[i] - c;
        acc[i] += d * d;
    }
}

void sub_square_scalar(double* dst, const double* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] -= src[i] * src[i];
}

void exp_scale_scalar(double* dst, const double* src, double a, double b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = b * std::exp(a * src[i]);
}

const KernelSet kScalar = {
    "scalar",
    axpy_scalar,
    scale_scalar,
    sqdist_accum_scalar,
    sub_square_scalar,
    exp_scale_scalar,
};

} // namespace

const KernelSet& scalar_kernels() { return kScalar; }

} // namespace sitemap::simd
