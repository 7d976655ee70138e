#pragma once

#include <array>
#include <limits>
#include <span>
#include <vector>

namespace sitemap {

struct Posterior {
    double mean = 0.0;
    double std = 0.0;
};

// Sentinel incumbent while no feasible observation exists: the improvement
// factor degenerates to 1 and selection is driven by feasibility alone.
inline constexpr double kNoFeasibleIncumbent = -std::numeric_limits<double>::infinity();

// Closed-form E[max(0, y - incumbent)] for y ~ N(mean, std^2).
double expected_improvement(const Posterior& p, double incumbent);

// P(y >= 0); an exact indicator when std = 0.
double feasibility_probability(const Posterior& p);

// expected_improvement times the product of per-constraint feasibility
// probabilities, taken left to right. incumbent = kNoFeasibleIncumbent turns
// the improvement factor into the constant 1.
double expected_constrained_improvement(const Posterior& obj,
                                        std::span<const Posterior> constraints,
                                        double incumbent);

// Non-dominated set for two maximized objectives. Points are kept sorted
// strictly decreasing in objective 1 (hence strictly increasing in objective
// 2) and every point strictly dominates the reference point.
struct ParetoFront2 {
    std::vector<std::array<double, 2>> points;
    std::array<double, 2> reference{0.0, 0.0};

    bool valid() const;
};

// Returns the front with the point inserted if it survives: points that do
// not strictly dominate the reference are dropped, weakly dominated points
// are dropped, newly dominated occupants are evicted.
ParetoFront2 pareto_insert(ParetoFront2 front, std::array<double, 2> point);

// Exact expected hypervolume improvement for independent Gaussian marginals,
// by strip decomposition over the sorted front. Empty front measures against
// the reference point alone.
double ehvi_2d(const Posterior& obj1, const Posterior& obj2, const ParetoFront2& front);

} // namespace sitemap
