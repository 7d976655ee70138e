#pragma once

#include "sitemap/simd_kernels.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace sitemap {

struct KernelParams {
    double length_scale = 0.1;
    double signal_variance = 1.0;
    double noise_variance = 0.01;

    void validate() const;
};

// Squared-exponential covariance. Throws on dimension mismatch.
double kernel_eval(std::span<const double> a, std::span<const double> b,
                   const KernelParams& params);

// Process-wide count of posterior variances clamped up to zero. Round-off can
// push the exact formula a hair negative; the clamp is silent but counted.
std::uint64_t gp_variance_clamp_count();
void gp_reset_variance_clamp_count();

using PriorMean = std::function<double(std::span<const double>)>;

struct Prediction {
    double mean;
    double variance;
};

// Query points laid out dimension-major: coords[d * count + q] is coordinate d
// of point q. This is the layout the batched kernels sweep over.
struct QueryBatch {
    std::size_t count = 0;
    std::size_t dim = 0;
    const double* coords = nullptr;
};

struct BatchWorkspace {
    std::vector<double> kx;
    std::vector<double> point;
};

// GP regression with a configurable prior mean. A model behaves as a value:
// updated() returns a grown copy, predict() is const and thread-safe. The
// factorization of (K + noise*I) is maintained incrementally, one new
// triangular row per observation.
class GpModel {
public:
    GpModel(std::size_t dim, KernelParams params, PriorMean prior = {});

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return y_.size(); }
    const KernelParams& params() const { return params_; }

    void add(std::span<const double> x, double y);
    GpModel updated(std::span<const double> x, double y) const;

    Prediction predict(std::span<const double> x) const;

    // Means and variances for a whole batch in one sweep. Equivalent to
    // calling predict() per point; the kernel set chooses scalar or vector
    // arithmetic. Output spans must hold batch.count elements.
    void predict_batch(const QueryBatch& batch, std::span<double> mean,
                       std::span<double> var, const simd::KernelSet& kernels,
                       BatchWorkspace& ws) const;

    double prior_at(std::span<const double> x) const;

private:
    void refresh_alpha();

    std::size_t dim_;
    KernelParams params_;
    PriorMean prior_;
    std::vector<double> xs_;     // row-major, size() * dim_
    std::vector<double> y_;
    std::vector<double> prior_y_;
    std::vector<double> chol_;   // lower triangle of (K + noise*I), row-major t*t
    std::vector<double> alpha_;  // (K + noise*I)^-1 (y - prior_y)
};

} // namespace sitemap
