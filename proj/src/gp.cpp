#include "sitemap/gp.hpp"

#include "sitemap/errors.hpp"

#include <atomic>
#include <cmath>
#include <cstring>

namespace sitemap {

namespace {
std::atomic<std::uint64_t> g_clamp_count{0};
} // namespace

std::uint64_t gp_variance_clamp_count() { return g_clamp_count.load(); }
void gp_reset_variance_clamp_count() { g_clamp_count.store(0); }

void KernelParams::validate() const {
    if (!(length_scale > 0.0)) throw InvalidArgument("length_scale must be positive");
    if (!(signal_variance > 0.0)) throw InvalidArgument("signal_variance must be positive");
    if (!(noise_variance >= 0.0)) throw InvalidArgument("noise_variance must be non-negative");
}

double kernel_eval(std::span<const double> a, std::span<const double> b,
                   const KernelParams& params) {
    if (a.size() != b.size()) throw InvalidArgument("kernel_eval: dimension mismatch");
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        sq += d * d;
    }
    return params.signal_variance * std::exp(-sq / (2.0 * params.length_scale * params.length_scale));
}

GpModel::GpModel(std::size_t dim, KernelParams params, PriorMean prior)
    : dim_(dim), params_(params), prior_(std::move(prior)) {
    if (dim_ == 0) throw InvalidArgument("GpModel: dimension must be positive");
    params_.validate();
}

double GpModel::prior_at(std::span<const double> x) const {
    return prior_ ? prior_(x) : 0.0;
}

void GpModel::add(std::span<const double> x, double y) {
    if (x.size() != dim_) throw InvalidArgument("GpModel::add: dimension mismatch");
    const std::size_t t = size();

    // New factorization row: solve L row = k(x, X), diagonal from the Schur
    // complement. Grown storage keeps the old t*t block at new row stride.
    std::vector<double> grown((t + 1) * (t + 1), 0.0);
    for (std::size_t i = 0; i < t; ++i) {
        std::memcpy(grown.data() + i * (t + 1), chol_.data() + i * t, (i + 1) * sizeof(double));
    }
    double* row = grown.data() + t * (t + 1);
    for (std::size_t j = 0; j < t; ++j) {
        double kj = kernel_eval(x, std::span<const double>(xs_.data() + j * dim_, dim_), params_);
        double s = kj;
        const double* lrow = grown.data() + j * (t + 1);
        for (std::size_t m = 0; m < j; ++m) s -= row[m] * lrow[m];
        row[j] = s / lrow[j];
    }
    double diag2 = params_.signal_variance + params_.noise_variance;
    for (std::size_t m = 0; m < t; ++m) diag2 -= row[m] * row[m];
    if (!(diag2 > 0.0) || !std::isfinite(diag2)) {
        throw NumericalError("GpModel::add: covariance factorization lost positive definiteness");
    }
    row[t] = std::sqrt(diag2);

    xs_.insert(xs_.end(), x.begin(), x.end());
    y_.push_back(y);
    prior_y_.push_back(prior_at(x));
    chol_ = std::move(grown);
    refresh_alpha();
}

GpModel GpModel::updated(std::span<const double> x, double y) const {
    GpModel copy = *this;
    copy.add(x, y);
    return copy;
}

void GpModel::refresh_alpha() {
    const std::size_t t = size();
    alpha_.assign(t, 0.0);
    for (std::size_t i = 0; i < t; ++i) {
        double s = y_[i] - prior_y_[i];
        const double* row = chol_.data() + i * t;
        for (std::size_t j = 0; j < i; ++j) s -= row[j] * alpha_[j];
        alpha_[i] = s / row[i];
    }
    for (std::size_t ii = t; ii-- > 0;) {
        double s = alpha_[ii];
        for (std::size_t j = ii + 1; j < t; ++j) s -= chol_[j * t + ii] * alpha_[j];
        alpha_[ii] = s / chol_[ii * t + ii];
    }
}

Prediction GpModel::predict(std::span<const double> x) const {
    if (x.size() != dim_) throw InvalidArgument("GpModel::predict: dimension mismatch");
    const std::size_t t = size();
    const double kxx = params_.signal_variance;
    if (t == 0) return {prior_at(x), kxx};

    std::vector<double> kx(t), v(t);
    for (std::size_t i = 0; i < t; ++i) {
        kx[i] = kernel_eval(x, std::span<const double>(xs_.data() + i * dim_, dim_), params_);
    }
    double mean = prior_at(x);
    for (std::size_t i = 0; i < t; ++i) mean += kx[i] * alpha_[i];

    for (std::size_t i = 0; i < t; ++i) {
        double s = kx[i];
        const double* row = chol_.data() + i * t;
        for (std::size_t j = 0; j < i; ++j) s -= row[j] * v[j];
        v[i] = s / row[i];
    }
    double var = kxx;
    for (std::size_t i = 0; i < t; ++i) var -= v[i] * v[i];
    if (var < 0.0) {
        g_clamp_count.fetch_add(1, std::memory_order_relaxed);
        var = 0.0;
    }
    return {mean, var};
}

void GpModel::predict_batch(const QueryBatch& batch, std::span<double> mean,
                            std::span<double> var, const simd::KernelSet& kernels,
                            BatchWorkspace& ws) const {
    if (batch.dim != dim_) throw InvalidArgument("predict_batch: dimension mismatch");
    if (mean.size() < batch.count || var.size() < batch.count) {
        throw InvalidArgument("predict_batch: output spans too small");
    }
    const std::size_t n = batch.count;
    const std::size_t t = size();
    const double sv = params_.signal_variance;

    ws.point.resize(dim_);
    for (std::size_t q = 0; q < n; ++q) {
        for (std::size_t d = 0; d < dim_; ++d) ws.point[d] = batch.coords[d * n + q];
        mean[q] = prior_at(ws.point);
        var[q] = sv;
    }
    if (t == 0) return;

    // kx row per training point over the whole query batch, then the same
    // forward substitution as the scalar path, applied across rows.
    ws.kx.assign(t * n, 0.0);
    const double expo = -1.0 / (2.0 * params_.length_scale * params_.length_scale);
    for (std::size_t i = 0; i < t; ++i) {
        double* row = ws.kx.data() + i * n;
        const double* xi = xs_.data() + i * dim_;
        for (std::size_t d = 0; d < dim_; ++d) {
            kernels.sqdist_accum(row, batch.coords + d * n, xi[d], n);
        }
        kernels.exp_scale(row, row, expo, sv, n);
    }

    for (std::size_t i = 0; i < t; ++i) {
        kernels.axpy(mean.data(), ws.kx.data() + i * n, alpha_[i], n);
    }

    for (std::size_t i = 0; i < t; ++i) {
        double* row = ws.kx.data() + i * n;
        const double* lrow = chol_.data() + i * t;
        for (std::size_t j = 0; j < i; ++j) {
            kernels.axpy(row, ws.kx.data() + j * n, -lrow[j], n);
        }
        kernels.scale(row, 1.0 / lrow[i], n);
        kernels.sub_square(var.data(), row, n);
    }

    std::uint64_t clamped = 0;
    for (std::size_t q = 0; q < n; ++q) {
        if (var[q] < 0.0) {
            var[q] = 0.0;
            ++clamped;
        }
    }
    if (clamped) g_clamp_count.fetch_add(clamped, std::memory_order_relaxed);
}

} // namespace sitemap
