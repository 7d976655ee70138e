#include "sitemap/simd_kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstdint>
#include <cstring>

namespace sitemap::simd {
namespace {

void axpy_avx2(double* dst, const double* src, double a, std::size_t n) {
    __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_loadu_pd(dst + i);
        __m256d s = _mm256_loadu_pd(src + i);
        _mm256_storeu_pd(dst + i, _mm256_fmadd_pd(av, s, d));
    }
    for (; i < n; ++i) dst[i] += a * src[i];
}

void scale_avx2(double* dst, double a, std::size_t n) {
    __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(dst + i, _mm256_mul_pd(_mm256_loadu_pd(dst + i), av));
    }
    for (; i < n; ++i) dst[i] *= a;
}

void sqdist_accum_avx2(double* acc, const double* xs, double c, std::size_t n) {
    __m256d cv = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(xs + i), cv);
        __m256d a = _mm256_loadu_pd(acc + i);
        _mm256_storeu_pd(acc + i, _mm256_fmadd_pd(d, d, a));
    }
    for (; i < n; ++i) {
        double d = xs[i] - c;
        acc[i] += d * d;
    }
}

void sub_square_avx2(double* dst, const double* src, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d s = _mm256_loadu_pd(src + i);
        __m256d d = _mm256_loadu_pd(dst + i);
        _mm256_storeu_pd(dst + i, _mm256_fnmadd_pd(s, s, d));
    }
    for (; i < n; ++i) dst[i] -= src[i] * src[i];
}

// exp for non-positive arguments: n = round(x/ln2), r = x - n*ln2 with the
// constant split in two for an exact reduction, degree-13 Taylor polynomial
// on |r| <= ln2/2, then scaling by 2^n through the exponent bits. Arguments
// below -708 (result under the smallest normal double) flush to zero.
constexpr double kLog2E = 1.44269504088896338700e+00;
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kExpCoeff[14] = {
    1.0,
    1.0,
    1.0 / 2,
    1.0 / 6,
    1.0 / 24,
    1.0 / 120,
    1.0 / 720,
    1.0 / 5040,
    1.0 / 40320,
    1.0 / 362880,
    1.0 / 3628800,
    1.0 / 39916800,
    1.0 / 479001600,
    1.0 / 6227020800.0,
};
constexpr double kExpUnderflow = -708.0;

double exp_neg_poly(double x) {
    if (x < kExpUnderflow) return 0.0;
    double nf = std::nearbyint(x * kLog2E);
    double r = x - nf * kLn2Hi;
    r -= nf * kLn2Lo;
    double p = kExpCoeff[13];
    for (int k = 12; k >= 0; --k) p = p * r + kExpCoeff[k];
    std::int64_t bits = (static_cast<std::int64_t>(nf) + 1023) << 52;
    double pow2n;
    std::memcpy(&pow2n, &bits, sizeof pow2n);
    return p * pow2n;
}

__m256d exp_neg_avx2(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(kLog2E);
    const __m256d ln2hi = _mm256_set1_pd(kLn2Hi);
    const __m256d ln2lo = _mm256_set1_pd(kLn2Lo);
    const __m256d lo_cut = _mm256_set1_pd(kExpUnderflow);

    __m256d keep = _mm256_cmp_pd(x, lo_cut, _CMP_GE_OQ);
    __m256d xc = _mm256_max_pd(x, lo_cut);

    __m256d nf = _mm256_round_pd(_mm256_mul_pd(xc, log2e),
                                 _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(nf, ln2hi, xc);
    r = _mm256_fnmadd_pd(nf, ln2lo, r);

    __m256d p = _mm256_set1_pd(kExpCoeff[13]);
    for (int k = 12; k >= 0; --k) {
        p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kExpCoeff[k]));
    }

    // 2^n for n in [-1021, 1]: widen rounded n to 64-bit lanes, bias, shift.
    __m128i n32 = _mm256_cvtpd_epi32(nf);
    __m256i n64 = _mm256_cvtepi32_epi64(n32);
    __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
    __m256d pow2n = _mm256_castsi256_pd(bits);

    return _mm256_and_pd(_mm256_mul_pd(p, pow2n), keep);
}

void exp_scale_avx2(double* dst, const double* src, double a, double b, std::size_t n) {
    __m256d av = _mm256_set1_pd(a);
    __m256d bv = _mm256_set1_pd(b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d e = exp_neg_avx2(_mm256_mul_pd(av, _mm256_loadu_pd(src + i)));
        _mm256_storeu_pd(dst + i, _mm256_mul_pd(bv, e));
    }
    for (; i < n; ++i) dst[i] = b * exp_neg_poly(a * src[i]);
}

const KernelSet kAvx2 = {
    "avx2",
    axpy_avx2,
    scale_avx2,
    sqdist_accum_avx2,
    sub_square_avx2,
    exp_scale_avx2,
};

} // namespace

const KernelSet& avx2_kernels() { return kAvx2; }

} // namespace sitemap::simd

#else // non-x86: no vector variant, dispatch falls back to scalar

namespace sitemap::simd {

const KernelSet& avx2_kernels() { return scalar_kernels(); }

} // namespace sitemap::simd

#endif
