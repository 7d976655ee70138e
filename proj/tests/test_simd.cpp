#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sitemap/rng.hpp"
#include "sitemap/simd_kernels.hpp"

#include <cmath>
#include <vector>

using namespace sitemap;

namespace {

const std::size_t kLens[] = {0, 1, 2, 3, 4, 5, 7, 8, 13, 16, 31, 64, 257, 1000};

std::vector<double> random_vec(Rng& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

void check_close(const std::vector<double>& a, const std::vector<double>& b, double rel) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        double scale = std::max({std::fabs(a[i]), std::fabs(b[i]), 1.0});
        CHECK(std::fabs(a[i] - b[i]) <= rel * scale);
    }
}

} // namespace

TEST_CASE("kernel variants agree with the scalar reference") {
    const auto& ref = simd::scalar_kernels();
    const auto& vec = simd::avx2_kernels();
    if (!simd::avx2_available()) return;

    Rng rng(20240817);
    for (std::size_t n : kLens) {
        auto src = random_vec(rng, n, -3.0, 3.0);
        double a = rng.uniform(-2.0, 2.0);

        auto d1 = random_vec(rng, n, -3.0, 3.0);
        auto d2 = d1;
        ref.axpy(d1.data(), src.data(), a, n);
        vec.axpy(d2.data(), src.data(), a, n);
        check_close(d1, d2, 1e-15);

        d2 = d1;
        ref.scale(d1.data(), a, n);
        vec.scale(d2.data(), a, n);
        check_close(d1, d2, 1e-15);

        d2 = d1;
        double c = rng.uniform(-1.0, 1.0);
        ref.sqdist_accum(d1.data(), src.data(), c, n);
        vec.sqdist_accum(d2.data(), src.data(), c, n);
        check_close(d1, d2, 1e-15);

        auto sq = random_vec(rng, n, -1.0, 1.0);
        d2 = d1;
        ref.sub_square(d1.data(), sq.data(), n);
        vec.sub_square(d2.data(), sq.data(), n);
        check_close(d1, d2, 1e-15);

        auto dist = random_vec(rng, n, 0.0, 50.0);
        std::vector<double> e1(n), e2(n);
        double aa = -rng.uniform(0.01, 60.0);
        double bb = rng.uniform(0.1, 4.0);
        ref.exp_scale(e1.data(), dist.data(), aa, bb, n);
        vec.exp_scale(e2.data(), dist.data(), aa, bb, n);
        check_close(e1, e2, 1e-13);
    }
}

TEST_CASE("vector exp matches libm across the non-positive domain") {
    if (!simd::avx2_available()) return;
    const auto& vec = simd::avx2_kernels();

    std::vector<double> xs;
    for (double x = 0.0; x >= -720.0; x -= 0.000703) xs.push_back(-x);
    for (auto& x : xs) x = -x;
    std::vector<double> got(xs.size());
    // a = 1, b = 1 turns exp_scale into plain exp over src >= 0 negated inputs
    std::vector<double> neg(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) neg[i] = -xs[i];
    vec.exp_scale(got.data(), neg.data(), -1.0, 1.0, xs.size());

    for (std::size_t i = 0; i < xs.size(); ++i) {
        double want = std::exp(xs[i]);
        if (xs[i] < -708.0) {
            CHECK(got[i] == 0.0);
        } else {
            CHECK(std::fabs(got[i] - want) <= 1e-13 * want);
        }
    }
}

TEST_CASE("exp_scale tolerates dst aliased onto src") {
    for (const simd::KernelSet* ks : {&simd::scalar_kernels(), &simd::avx2_kernels()}) {
        if (ks == &simd::avx2_kernels() && !simd::avx2_available()) continue;
        std::vector<double> buf(37);
        Rng rng(7);
        for (auto& x : buf) x = rng.uniform(0.0, 10.0);
        auto expect = buf;
        for (auto& x : expect) x = 0.5 * std::exp(-2.0 * x);
        ks->exp_scale(buf.data(), buf.data(), -2.0, 0.5, buf.size());
        check_close(buf, expect, 1e-13);
    }
}

TEST_CASE("exact endpoints") {
    for (const simd::KernelSet* ks : {&simd::scalar_kernels(), &simd::avx2_kernels()}) {
        if (ks == &simd::avx2_kernels() && !simd::avx2_available()) continue;
        double in[5] = {0.0, 1.0, 2.0, 800.0, 1000.0};
        double out[5];
        ks->exp_scale(out, in, -1.0, 1.0, 5);
        CHECK(out[0] == 1.0);
        CHECK(out[3] == 0.0);
        CHECK(out[4] == 0.0);
    }
}

TEST_CASE("dispatch returns a usable set") {
    const auto& ks = simd::active_kernels();
    CHECK(ks.name != nullptr);
    double v[3] = {1.0, 2.0, 3.0};
    double s[3] = {1.0, 1.0, 1.0};
    ks.axpy(v, s, 2.0, 3);
    CHECK(v[0] == doctest::Approx(3.0));
    CHECK(v[2] == doctest::Approx(5.0));
}
