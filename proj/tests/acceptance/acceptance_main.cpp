// Release gate. Each numbered block checks one claim the library is sold on
// and prints a single PASS/FAIL line; the process exits non-zero if any block
// fails. The expensive blocks (6-8) share one set of generated maps.

#include "sitemap/acquisition.hpp"
#include "sitemap/adaptation.hpp"
#include "sitemap/archive.hpp"
#include "sitemap/bench.hpp"
#include "sitemap/crawler.hpp"
#include "sitemap/gp.hpp"
#include "sitemap/rng.hpp"

#include "../helpers/dense_oracle.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

using namespace sitemap;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

bool report(int index, const char* label, const Outcome& o) {
    std::printf("%d. %-58s %s%s%s\n", index, label, o.pass ? "PASS" : "FAIL",
                o.detail.empty() ? "" : "  ", o.detail.c_str());
    std::fflush(stdout);
    return o.pass;
}

std::string fmt(const char* f, ...) {
    va_list ap;
    va_start(ap, f);
    char buf[256];
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// ---------------------------------------------------------------- block 1+2

// 1: posterior mean and variance agree with an explicit dense solve on 200
//    random models (up to 30 observations, up to 6 dims, half with a
//    non-trivial prior mean) within 1e-8, in under 10 s.
Outcome gp_matches_dense_solve() {
    auto t0 = Clock::now();
    Rng rng(101);
    double worst = 0.0;
    for (int inst = 0; inst < 200; ++inst) {
        std::size_t dim = 1 + rng.uniform_index(6);
        std::size_t n = 1 + rng.uniform_index(30);
        KernelParams kp;
        kp.length_scale = rng.uniform(0.05, 0.6);
        kp.signal_variance = rng.uniform(0.2, 3.0);
        kp.noise_variance = rng.uniform(1e-4, 0.05);

        std::vector<double> w(dim);
        for (auto& v : w) v = rng.uniform(-1.0, 1.0);
        double bias = rng.uniform(-1.0, 1.0);
        PriorMean prior;
        if (inst % 2 == 1) {
            prior = [w, bias](std::span<const double> x) {
                double s = bias;
                for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * x[i] + 0.3 * x[i] * x[i];
                return s;
            };
        }
        auto prior_value = [&](std::span<const double> x) { return prior ? prior(x) : 0.0; };

        GpModel gp(dim, kp, prior);
        oracle::GpReference ref{dim, kp.length_scale, kp.signal_variance, kp.noise_variance, {}, {}};
        std::vector<double> x(dim);
        for (std::size_t i = 0; i < n; ++i) {
            for (auto& v : x) v = rng.uniform01();
            double y = std::sin(3.0 * x[0]) + rng.uniform(-0.3, 0.3);
            gp.add(x, y);
            ref.xs.insert(ref.xs.end(), x.begin(), x.end());
            ref.residual.push_back(y - prior_value(x));
        }
        for (int q = 0; q < 5; ++q) {
            for (auto& v : x) v = rng.uniform(-0.2, 1.2);
            Prediction got = gp.predict(x);
            auto [mean, var] = ref.predict(x, prior_value(x));
            worst = std::max({worst, std::fabs(got.mean - mean), std::fabs(got.variance - var)});
        }
    }
    double dt = seconds_since(t0);
    return {worst <= 1e-8 && dt < 10.0, fmt("max err %.2e, %.1f s", worst, dt)};
}

// 2: shifting the prior mean and every target by the same constant shifts
//    posterior means by exactly that constant and leaves variances unchanged,
//    on 100 random models, within 1e-10.
Outcome prior_shift_equivariance() {
    Rng rng(202);
    double worst = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
        std::size_t dim = 1 + rng.uniform_index(5);
        std::size_t n = 1 + rng.uniform_index(20);
        KernelParams kp;
        kp.length_scale = rng.uniform(0.05, 0.5);
        kp.signal_variance = rng.uniform(0.3, 2.0);
        kp.noise_variance = rng.uniform(1e-3, 0.05);
        double shift = rng.uniform(-20.0, 20.0);
        double slope = rng.uniform(-1.0, 1.0);

        auto base = [slope](std::span<const double> x) {
            double s = 0.0;
            for (double v : x) s += slope * v;
            return s;
        };
        GpModel gp_a(dim, kp, base);
        GpModel gp_b(dim, kp,
                     [base, shift](std::span<const double> x) { return base(x) + shift; });

        std::vector<double> x(dim);
        for (std::size_t i = 0; i < n; ++i) {
            for (auto& v : x) v = rng.uniform01();
            double y = rng.uniform(-1.0, 1.0);
            gp_a.add(x, y);
            gp_b.add(x, y + shift);
        }
        for (int q = 0; q < 5; ++q) {
            for (auto& v : x) v = rng.uniform01();
            Prediction a = gp_a.predict(x);
            Prediction b = gp_b.predict(x);
            worst = std::max({worst, std::fabs(b.mean - a.mean - shift),
                              std::fabs(b.variance - a.variance)});
        }
    }
    return {worst <= 1e-10, fmt("max err %.2e", worst)};
}

// ------------------------------------------------------------------ block 3

double front_hypervolume(const std::vector<std::array<double, 2>>& pts,
                         const std::array<double, 2>& ref) {
    // pts sorted strictly decreasing in [0]; strip sum against the reference
    double hv = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double right = i + 1 < pts.size() ? pts[i + 1][0] : ref[0];
        hv += (pts[i][0] - right) * (pts[i][1] - ref[1]);
    }
    return hv;
}

// Hypervolume gained by adding p, via merge-and-recompute on a scratch copy.
double hv_gain(const std::vector<std::array<double, 2>>& pts, const std::array<double, 2>& ref,
               double base_hv, std::array<double, 2> p,
               std::vector<std::array<double, 2>>& scratch) {
    if (!(p[0] > ref[0] && p[1] > ref[1])) return 0.0;
    scratch.clear();
    bool placed = false;
    for (const auto& q : pts) {
        if (q[0] >= p[0] && q[1] >= p[1]) return 0.0; // dominated, no gain
        if (!placed && q[0] < p[0]) {
            scratch.push_back(p);
            placed = true;
        }
        if (!(q[0] <= p[0] && q[1] <= p[1])) scratch.push_back(q); // drop newly dominated
    }
    if (!placed) scratch.push_back(p);
    return front_hypervolume(scratch, ref) - base_hv;
}

// 3: closed-form expected improvement and the two-objective expected
//    hypervolume improvement match Monte Carlo estimates (1e7 draws) within
//    1e-3 absolute on 50 random posteriors each; the constrained form equals
//    improvement times the feasibility product bit for bit and collapses to
//    plain expected improvement when no constraints exist. Under 2 min.
Outcome acquisition_matches_monte_carlo() {
    auto t0 = Clock::now();
    constexpr int kDraws = 10'000'000;
    Rng rng(303);

    double worst_ei = 0.0;
    for (int inst = 0; inst < 50; ++inst) {
        Posterior p{rng.uniform(-1.0, 1.0), rng.uniform(0.05, 0.5)};
        double inc = rng.uniform(-1.0, 1.0);
        double exact = expected_improvement(p, inc);
        double acc = 0.0;
        for (int d = 0; d < kDraws; ++d) {
            double y = p.mean + p.std * rng.normal();
            if (y > inc) acc += y - inc;
        }
        worst_ei = std::max(worst_ei, std::fabs(acc / kDraws - exact));
    }

    double worst_ehvi = 0.0;
    std::vector<std::array<double, 2>> scratch;
    for (int inst = 0; inst < 50; ++inst) {
        ParetoFront2 front;
        front.reference = {rng.uniform(-0.5, 0.0), rng.uniform(-0.5, 0.0)};
        int seeds = 2 + static_cast<int>(rng.uniform_index(5));
        for (int s = 0; s < seeds; ++s) {
            front = pareto_insert(front, {rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)});
        }
        Posterior p1{rng.uniform(0.2, 1.1), rng.uniform(0.05, 0.3)};
        Posterior p2{rng.uniform(0.2, 1.1), rng.uniform(0.05, 0.3)};
        double exact = ehvi_2d(p1, p2, front);
        double base_hv = front_hypervolume(front.points, front.reference);
        double acc = 0.0;
        for (int d = 0; d < kDraws; ++d) {
            std::array<double, 2> y{p1.mean + p1.std * rng.normal(),
                                    p2.mean + p2.std * rng.normal()};
            acc += hv_gain(front.points, front.reference, base_hv, y, scratch);
        }
        worst_ehvi = std::max(worst_ehvi, std::fabs(acc / kDraws - exact));
    }

    bool product_exact = true;
    for (int inst = 0; inst < 50; ++inst) {
        Posterior obj{rng.uniform(-1.0, 1.0), rng.uniform(0.01, 0.8)};
        double inc = rng.uniform(-1.0, 1.0);
        std::vector<Posterior> cs(rng.uniform_index(4));
        for (auto& c : cs) c = {rng.uniform(-2.0, 2.0), rng.uniform(0.01, 1.0)};
        double byhand = expected_improvement(obj, inc);
        for (const auto& c : cs) byhand *= feasibility_probability(c);
        if (expected_constrained_improvement(obj, cs, inc) != byhand) product_exact = false;
        if (expected_constrained_improvement(obj, {}, inc) != expected_improvement(obj, inc)) {
            product_exact = false;
        }
    }

    double dt = seconds_since(t0);
    bool pass = worst_ei <= 1e-3 && worst_ehvi <= 1e-3 && product_exact && dt < 120.0;
    return {pass, fmt("ei err %.2e, ehvi err %.2e, product %s, %.0f s", worst_ei, worst_ehvi,
                      product_exact ? "exact" : "DRIFTED", dt)};
}

// ------------------------------------------------------------------ block 4

EvalResult separable_eval(const Genotype& g) {
    // analytic testbed: descriptor = first five genes, performance peaks at 0.5
    EvalResult r;
    double f = 8.0;
    for (int i = 0; i < 5; ++i) {
        double d = g.params[i] - 0.5;
        f += 0.25 - d * d;
    }
    r.performance = f;
    for (int i = 0; i < 4; ++i) r.duty[i] = g.params[i];
    r.safety_values = {g.params[4]};
    return r;
}

double separable_cell_optimum(std::size_t idx, const Resolution& res) {
    std::array<std::size_t, 5> bins;
    for (std::size_t k = 5; k-- > 0;) {
        bins[k] = idx % res[k];
        idx /= res[k];
    }
    double f = 8.0;
    for (std::size_t k = 0; k < 5; ++k) {
        double lo = static_cast<double>(bins[k]) / static_cast<double>(res[k]);
        double hi = static_cast<double>(bins[k] + 1) / static_cast<double>(res[k]);
        double best =
            (lo <= 0.5 && 0.5 <= hi) ? 0.5 : (std::fabs(lo - 0.5) < std::fabs(hi - 0.5) ? lo : hi);
        f += 0.25 - (best - 0.5) * (best - 0.5);
    }
    return f;
}

// 4: map illumination on the separable analytic objective with a 1e5 budget:
//    coverage never shrinks, no cell ever gets worse, equal seeds give
//    bitwise-equal maps, and every filled cell reaches at least 95% of its
//    analytic optimum. Under 5 min.
Outcome map_elites_properties() {
    auto t0 = Clock::now();
    MapElitesConfig cfg;
    cfg.budget = 100000;
    cfg.init_count = 2000;
    cfg.force_norm_max = 1.0;
    cfg.seed = 7;

    bool monotone = true;
    bool elitist = true;
    std::size_t prev_filled = 0;
    std::unordered_map<std::size_t, double> best_seen;
    cfg.on_batch = [&](const Archive& a, std::size_t) {
        if (a.filled() < prev_filled) monotone = false;
        prev_filled = a.filled();
        for (std::size_t idx : a.filled_indices()) {
            double perf = a.cell(idx)->performance;
            auto it = best_seen.find(idx);
            if (it == best_seen.end()) {
                best_seen.emplace(idx, perf);
            } else {
                if (perf < it->second) elitist = false;
                it->second = perf;
            }
        }
    };
    Archive a = run_map_elites(separable_eval, cfg);

    cfg.on_batch = {};
    Archive b = run_map_elites(separable_eval, cfg);
    bool deterministic = a.filled() == b.filled();
    std::size_t below_target = 0;
    for (std::size_t idx : a.filled_indices()) {
        const Elite* ea = a.cell(idx);
        const Elite* eb = b.cell(idx);
        if (eb == nullptr || ea->performance != eb->performance ||
            ea->genotype.params != eb->genotype.params) {
            deterministic = false;
        }
        if (ea->performance < 0.95 * separable_cell_optimum(idx, a.resolution())) ++below_target;
    }
    bool covered = a.filled() > 1000;

    double dt = seconds_since(t0);
    bool pass = monotone && elitist && deterministic && covered && below_target == 0 && dt < 300.0;
    return {pass, fmt("filled %zu, below-optimum cells %zu, %.1f s", a.filled(), below_target, dt)};
}

// ------------------------------------------------------------------ block 5

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    auto rank = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
        std::vector<double> r(v.size());
        std::size_t i = 0;
        while (i < idx.size()) {
            std::size_t j = i;
            while (j < idx.size() && v[idx[j]] == v[idx[i]]) ++j;
            double mid = 0.5 * static_cast<double>(i + j - 1);
            for (std::size_t k = i; k < j; ++k) r[idx[k]] = mid;
            i = j;
        }
        return r;
    };
    auto ra = rank(a), rb = rank(b);
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= static_cast<double>(ra.size());
    mb /= static_cast<double>(rb.size());
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        num += (ra[i] - ma) * (rb[i] - mb);
        da += (ra[i] - ma) * (ra[i] - ma);
        db += (rb[i] - mb) * (rb[i] - mb);
    }
    return num / std::sqrt(da * db);
}

// 5: simulator sanity. A standing robot carries its weight on the limbs
//    within 2%; halving the time step moves speed by under 5% on 20 random
//    gaits; speed and summed contact force correlate positively over 500
//    random gaits.
Outcome simulator_sanity() {
    CrawlerConfig cfg;

    Genotype rest;
    rest.params.assign(24, 0.0);
    for (int j = 0; j < 8; ++j) rest.params[3 * j + 2] = 0.5;
    SimResult still = measure_with_damage(cfg, rest, {});
    double weight = cfg.body_mass * cfg.gravity;
    bool statics = !still.failed && std::fabs(still.force_sum - weight) <= 0.02 * weight;

    CrawlerConfig fine = cfg;
    fine.dt = 5e-4;
    Rng rng(55);
    auto random_genotype = [&rng]() {
        Genotype g;
        g.params.resize(24);
        for (auto& p : g.params) p = rng.uniform01();
        return g;
    };
    int compared = 0;
    double worst_rel = 0.0;
    for (int i = 0; i < 20; ++i) {
        Genotype g = random_genotype();
        SimResult coarse = measure_with_damage(cfg, g, {});
        SimResult halved = measure_with_damage(fine, g, {});
        if (coarse.failed || halved.failed) continue;
        ++compared;
        worst_rel = std::max(worst_rel,
                             std::fabs(coarse.speed - halved.speed) /
                                 std::max({std::fabs(coarse.speed), std::fabs(halved.speed), 0.02}));
    }
    bool converged = compared >= 18 && worst_rel < 0.05;

    Rng rng2(1);
    std::vector<double> speeds, forces;
    for (int i = 0; i < 500; ++i) {
        Genotype g;
        g.params.resize(24);
        for (auto& p : g.params) p = rng2.uniform01();
        SimResult r = measure_with_damage(cfg, g, {});
        if (r.failed) continue;
        speeds.push_back(r.speed);
        forces.push_back(r.force_sum);
    }
    double rho = spearman(speeds, forces);
    bool correlated = speeds.size() >= 400 && rho > 0.0;

    bool pass = statics && converged && correlated;
    return {pass, fmt("rest force %.2f/%.2f N, step-halving worst %.1f%%, rho %.2f", still.force_sum,
                      weight, 100.0 * worst_rel, rho)};
}

// --------------------------------------------------------------- blocks 6-8

struct MatrixState {
    ExperimentPlan plan;
    std::vector<BenchRun> first;
    std::string map1;
    bool ready = false;
    std::string error;
};

void build_matrix(MatrixState& st) {
    auto dir = fs::temp_directory_path() / "sitemap_acceptance";
    fs::create_directories(dir);
    CrawlerConfig ccfg;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        MapElitesConfig mc;
        mc.seed = seed;
        mc.genotype_size = crawler_genotype_size(ccfg);
        auto evaluate = [&ccfg](const Genotype& g) {
            SimResult r = measure_with_damage(ccfg, g, {});
            return EvalResult{r.speed, r.duty, {r.force_sum}, r.failed};
        };
        Archive arch = run_map_elites(evaluate, mc);
        std::string path = (dir / ("map" + std::to_string(seed) + ".bin")).string();
        save_archive(arch, path);
        st.plan.archives.push_back(path);
        std::fprintf(stderr, "  map seed %llu: filled %zu\n",
                     static_cast<unsigned long long>(seed), arch.filled());
    }
    st.map1 = st.plan.archives.front();
    st.plan.replicates = 20;
    st.plan.trials = 30;
    st.plan.base_seed = 1;
    st.plan.stop_ratio = 1.0; // every run spends the full trial budget
    st.first = run_experiment(st.plan, 1);
    st.ready = true;
}

// 6: the recovery comparison at desk scale (4 maps x 4 damages x 3 strategies
//    x 20 replicates x 30 trials, no early stop). Per damage, median unsafe
//    trials order safety-aware < force-front < performance-only, the
//    safety-aware strategy's unsafe counts beat performance-only at p < 0.01,
//    and its median best safe speed is at least the others' in 3 of 4
//    damages. Under 30 min including map generation.
Outcome ordering_reproduction(MatrixState& st) {
    auto t0 = Clock::now();
    try {
        build_matrix(st);
    } catch (const std::exception& e) {
        st.error = e.what();
        return {false, std::string("matrix failed: ") + e.what()};
    }

    std::map<std::pair<std::string, Strategy>, std::vector<double>> unsafe, best;
    for (const BenchRun& r : st.first) {
        unsafe[{r.record.damage, r.record.strategy}].push_back(r.record.unsafe);
        best[{r.record.damage, r.record.strategy}].push_back(r.record.best_safe);
    }

    int unsafe_ordered = 0;
    bool significant = true;
    int best_wins = 0;
    std::string per_damage; // triples are site/mo-ite/ite
    for (const std::string& d : st.plan.damages) {
        double u_ite = median(unsafe[{d, Strategy::ITE}]);
        double u_mo = median(unsafe[{d, Strategy::MO_ITE}]);
        double u_site = median(unsafe[{d, Strategy::SITE}]);
        if (u_site < u_mo && u_mo < u_ite) ++unsafe_ordered;
        MwuResult m = mann_whitney_u(unsafe[{d, Strategy::SITE}], unsafe[{d, Strategy::ITE}]);
        if (!(m.p < 0.01)) significant = false;
        double b_ite = median(best[{d, Strategy::ITE}]);
        double b_mo = median(best[{d, Strategy::MO_ITE}]);
        double b_site = median(best[{d, Strategy::SITE}]);
        if (b_site >= b_ite && b_site >= b_mo) ++best_wins;
        per_damage += fmt("%s%s u=%.1f/%.1f/%.1f b=%.3f/%.3f/%.3f p=%.1e",
                          per_damage.empty() ? "" : " ", d.c_str(),
                          u_site, u_mo, u_ite, b_site, b_mo, b_ite, m.p);
    }
    double dt = seconds_since(t0);
    bool pass = unsafe_ordered == 4 && significant && best_wins >= 3 && dt < 1800.0;
    return {pass, fmt("%s; unsafe ordered %d/4, best-safe wins %d/4, %.0f s",
                      per_damage.c_str(), unsafe_ordered, best_wins, dt)};
}

// 7: with no damage the adaptation loop is a pure archive replay: every
//    trial's measurements equal the stored elite's values exactly, and the
//    first safety-aware selection's posterior mean equals the archived
//    performance within 1e-9.
Outcome undamaged_replay(const MatrixState& st) {
    if (!st.ready) return {false, "matrix unavailable: " + st.error};
    Archive arch = load_archive(st.map1);
    CrawlerConfig ccfg;
    AdaptationConfig acfg;
    acfg.max_trials = 30;
    acfg.stop_ratio = 1.0;
    acfg.constraints = {{"force_sum", arch.meta.safety_threshold}};
    auto executor = make_crawler_executor(ccfg, {});

    bool exact = true;
    double first_gap = 0.0;
    for (Strategy s : {Strategy::ITE, Strategy::MO_ITE, Strategy::SITE}) {
        acfg.strategy = s;
        TrialLog log = adapt(arch, executor, acfg);
        for (const Trial& t : log.trials) {
            const Elite* e = arch.cell(t.cell);
            // the trial stores the margin, threshold minus the measurement
            if (e == nullptr || t.measured_performance != e->performance ||
                t.measured_constraints.at(0) !=
                    arch.meta.safety_threshold - e->safety_values.at(0)) {
                exact = false;
            }
        }
        if (s == Strategy::SITE) {
            GpModel gp(kDescriptorDims, acfg.kernel, [&arch](std::span<const double> x) {
                Descriptor d;
                std::copy_n(x.begin(), kDescriptorDims, d.v.begin());
                return arch.cell(arch.cell_index(d))->performance;
            });
            const Trial& t0 = log.trials.front();
            first_gap = std::fabs(gp.predict(t0.descriptor.v).mean -
                                  arch.cell(t0.cell)->performance);
        }
    }
    bool pass = exact && first_gap <= 1e-9;
    return {pass, fmt("measurements %s, first posterior gap %.1e",
                      exact ? "exact" : "DRIFTED", first_gap)};
}

// 8: running the whole comparison twice from the same base seed produces a
//    byte-identical summary table.
Outcome end_to_end_determinism(const MatrixState& st) {
    if (!st.ready) return {false, "matrix unavailable: " + st.error};
    std::vector<RunRecord> r1;
    for (const BenchRun& r : st.first) r1.push_back(r.record);
    auto second = run_experiment(st.plan, 1);
    std::vector<RunRecord> r2;
    for (const BenchRun& r : second) r2.push_back(r.record);
    Summary s1 = summarize(std::move(r1));
    Summary s2 = summarize(std::move(r2));
    bool pass = s1.summary_csv == s2.summary_csv;
    return {pass, fmt("%zu summary bytes %s", s1.summary_csv.size(),
                      pass ? "identical" : "DIFFER")};
}

} // namespace

int main() {
    std::printf("release gate: eight checks, the slow ones print progress to stderr\n");
    bool all = true;
    all &= report(1, "posterior matches dense solve (200 models)", gp_matches_dense_solve());
    all &= report(2, "prior shift moves means by the shift, variances fixed", prior_shift_equivariance());
    all &= report(3, "acquisition values match Monte Carlo (1e7 draws)", acquisition_matches_monte_carlo());
    all &= report(4, "map illumination: monotone, elitist, deterministic, 95%", map_elites_properties());
    all &= report(5, "simulator statics, step convergence, force correlation", simulator_sanity());
    MatrixState st;
    all &= report(6, "recovery ordering: unsafe counts and best safe speed", ordering_reproduction(st));
    all &= report(7, "undamaged adaptation replays the archive exactly", undamaged_replay(st));
    all &= report(8, "full comparison rerun is byte-identical", end_to_end_determinism(st));
    std::printf(all ? "all checks passed\n" : "GATE FAILED\n");
    return all ? 0 : 1;
}
