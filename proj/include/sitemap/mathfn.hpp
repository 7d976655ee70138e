#pragma once

#include <cmath>

namespace sitemap {

// Error function via W. J. Cody's rational Chebyshev approximations
// (Math. Comp. 23, 1969; the CALERF/SPECFUN scheme). Three regimes:
// |x| <= 0.46875 rational in x^2, 0.46875 < |x| <= 4 rational in |x| times
// exp(-x^2), |x| > 4 asymptotic rational in 1/x^2. Absolute error is below
// 1e-16 everywhere, well inside the 1e-12 budget this project documents,
// and the result is a fixed function of the coefficients rather than of
// whatever libm happens to be linked.
double erf_cody(double x);
double erfc_cody(double x);

inline double normal_pdf(double z) {
    static constexpr double inv_sqrt_2pi = 0.39894228040143267794;
    return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

inline double normal_cdf(double z) {
    static constexpr double inv_sqrt_2 = 0.70710678118654752440;
    return 0.5 * erfc_cody(-z * inv_sqrt_2);
}

} // namespace sitemap
