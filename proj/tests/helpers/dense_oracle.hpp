#pragma once

// Naive dense-linear-algebra reference used only by tests. Deliberately
// independent of the library's factorization: Gauss-Jordan elimination with
// partial pivoting on the explicit covariance matrix.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace oracle {

// Row-major n*n inverse.
inline std::vector<double> invert(std::vector<double> a, std::size_t n) {
    std::vector<double> inv(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::fabs(a[r * n + col]) > std::fabs(a[piv * n + col])) piv = r;
        }
        if (a[piv * n + col] == 0.0) throw std::runtime_error("oracle: singular matrix");
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(a[piv * n + c], a[col * n + c]);
                std::swap(inv[piv * n + c], inv[col * n + c]);
            }
        }
        double d = a[col * n + col];
        for (std::size_t c = 0; c < n; ++c) {
            a[col * n + c] /= d;
            inv[col * n + c] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = a[r * n + col];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                a[r * n + c] -= f * a[col * n + c];
                inv[r * n + c] -= f * inv[col * n + c];
            }
        }
    }
    return inv;
}

inline double se_kernel(std::span<const double> a, std::span<const double> b,
                        double length_scale, double signal_variance) {
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        sq += d * d;
    }
    return signal_variance * std::exp(-sq / (2.0 * length_scale * length_scale));
}

struct GpReference {
    std::size_t dim;
    double length_scale;
    double signal_variance;
    double noise_variance;
    std::vector<double> xs;       // row-major t*dim
    std::vector<double> residual; // y - prior(x_i)

    std::size_t count() const { return dim == 0 ? 0 : xs.size() / dim; }

    // Posterior via the explicit inverse of (K + noise I). prior_x is the
    // prior mean at the probe point.
    std::pair<double, double> predict(std::span<const double> x, double prior_x) const {
        std::size_t t = count();
        if (t == 0) return {prior_x, signal_variance};
        std::vector<double> kmat(t * t);
        for (std::size_t i = 0; i < t; ++i) {
            for (std::size_t j = 0; j < t; ++j) {
                kmat[i * t + j] = se_kernel({xs.data() + i * dim, dim}, {xs.data() + j * dim, dim},
                                            length_scale, signal_variance);
            }
            kmat[i * t + i] += noise_variance;
        }
        auto kinv = invert(std::move(kmat), t);
        std::vector<double> kx(t);
        for (std::size_t i = 0; i < t; ++i) {
            kx[i] = se_kernel(x, {xs.data() + i * dim, dim}, length_scale, signal_variance);
        }
        double mean = prior_x;
        double quad = 0.0;
        for (std::size_t i = 0; i < t; ++i) {
            double wi = 0.0;
            for (std::size_t j = 0; j < t; ++j) wi += kinv[i * t + j] * kx[j];
            mean += wi * residual[i];
            quad += wi * kx[i];
        }
        return {mean, signal_variance - quad};
    }
};

} // namespace oracle
