#include "sitemap/acquisition.hpp"

#include "sitemap/errors.hpp"
#include "sitemap/mathfn.hpp"

#include <algorithm>
#include <cmath>

namespace sitemap {

namespace {

// E[(y - t)^+] for y ~ N(mean, std^2); the one-sided partial expectation.
double partial_expectation(double mean, double std, double t) {
    if (std::isinf(t)) return t < 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    if (std <= 0.0) return std::max(0.0, mean - t);
    double z = (mean - t) / std;
    return (mean - t) * normal_cdf(z) + std * normal_pdf(z);
}

} // namespace

double expected_improvement(const Posterior& p, double incumbent) {
    if (std::isnan(incumbent)) throw InvalidArgument("expected_improvement: incumbent is NaN");
    return partial_expectation(p.mean, p.std, incumbent);
}

double feasibility_probability(const Posterior& p) {
    if (p.std <= 0.0) return p.mean >= 0.0 ? 1.0 : 0.0;
    return normal_cdf(p.mean / p.std);
}

double expected_constrained_improvement(const Posterior& obj,
                                        std::span<const Posterior> constraints,
                                        double incumbent) {
    double ei = incumbent == kNoFeasibleIncumbent ? 1.0 : expected_improvement(obj, incumbent);
    for (const auto& c : constraints) ei *= feasibility_probability(c);
    return ei;
}

bool ParetoFront2::valid() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i][0] > reference[0]) || !(points[i][1] > reference[1])) return false;
        if (i > 0) {
            if (!(points[i][0] < points[i - 1][0])) return false;
            if (!(points[i][1] > points[i - 1][1])) return false;
        }
    }
    return true;
}

ParetoFront2 pareto_insert(ParetoFront2 front, std::array<double, 2> point) {
    if (!(point[0] > front.reference[0] && point[1] > front.reference[1])) return front;
    for (const auto& q : front.points) {
        if (q[0] >= point[0] && q[1] >= point[1]) return front;
    }
    std::erase_if(front.points, [&](const std::array<double, 2>& q) {
        return point[0] >= q[0] && point[1] >= q[1];
    });
    auto pos = std::lower_bound(front.points.begin(), front.points.end(), point,
                                [](const auto& a, const auto& b) { return a[0] > b[0]; });
    front.points.insert(pos, point);
    return front;
}

double ehvi_2d(const Posterior& obj1, const Posterior& obj2, const ParetoFront2& front) {
    if (!front.valid()) throw InvalidArgument("ehvi_2d: malformed front");
    const auto& pts = front.points;
    const std::size_t m = pts.size();
    const double r1 = front.reference[0];
    const double r2 = front.reference[1];

    // Strips along objective 1, walking the front in ascending objective 1
    // (stored order reversed). Strip k spans [b_k, b_{k+1}); inside it the
    // region not yet covered by the front starts at floor_k.
    auto c1 = [&](std::size_t k) { return pts[m - k][0]; };      // k in 1..m
    auto d2 = [&](std::size_t k) { return pts[m - k][1]; };

    double total = 0.0;
    double ei_lo = partial_expectation(obj1.mean, obj1.std, r1);
    for (std::size_t k = 0; k <= m; ++k) {
        double ei_hi = k < m ? partial_expectation(obj1.mean, obj1.std, c1(k + 1)) : 0.0;
        double floor_k = k < m ? d2(k + 1) : r2;
        double width = ei_lo - ei_hi;
        if (width > 0.0) total += width * partial_expectation(obj2.mean, obj2.std, floor_k);
        ei_lo = ei_hi;
    }
    return std::max(0.0, total);
}

} // namespace sitemap
