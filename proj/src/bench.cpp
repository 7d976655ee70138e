#include "sitemap/bench.hpp"

#include "sitemap/config.hpp"
#include "sitemap/errors.hpp"
#include "sitemap/mathfn.hpp"
#include "sitemap/parallel.hpp"
#include "sitemap/rng.hpp"
#include "textio.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <tuple>

namespace sitemap {

using textio::append_double;

void ExperimentPlan::validate() const {
    if (archives.empty()) throw ConfigError("plan lists no archives");
    std::set<std::string> seen_arch;
    for (const auto& a : archives) {
        if (a.empty()) throw ConfigError("plan has an empty archive path");
        if (!seen_arch.insert(a).second) throw ConfigError("plan repeats archive '" + a + "'");
    }
    if (damages.empty()) throw ConfigError("plan lists no damage cases");
    std::set<std::string> seen_dmg;
    for (const auto& d : damages) {
        if (!seen_dmg.insert(d).second) throw ConfigError("plan repeats damage '" + d + "'");
        try {
            damage_by_name(d);
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
    }
    if (strategies.empty()) throw ConfigError("plan lists no strategies");
    std::set<Strategy> seen_strat;
    for (Strategy s : strategies) {
        if (!seen_strat.insert(s).second) {
            throw ConfigError(std::string("plan repeats strategy '") + strategy_name(s) + "'");
        }
    }
    if (replicates < 2) throw ConfigError("replicates must be at least 2");
    if (trials < 1) throw ConfigError("trials must be at least 1");
    if (!(stop_ratio > 0.0 && stop_ratio <= 1.0)) throw ConfigError("stop_ratio must lie in (0,1]");
    kernel.validate();
}

ExperimentPlan load_plan(const std::string& path) {
    auto kv = parse_key_value_file(path);
    kv_reject_unknown(kv,
                      {"archives", "damages", "strategies", "replicates", "trials", "base_seed",
                       "stop_ratio", "kernel_length_scale", "kernel_signal_variance",
                       "kernel_noise_variance", "crawler_config"},
                      path);
    ExperimentPlan p;
    auto dir = std::filesystem::path(path).parent_path();
    auto resolve = [&dir](std::string_view s) {
        std::filesystem::path f{std::string(s)};
        if (f.is_relative()) f = dir / f;
        return f.string();
    };

    std::string arcs = kv_string(kv, "archives", "");
    p.archives.clear();
    for (auto part : textio::split(arcs, ',')) {
        if (!part.empty()) p.archives.push_back(resolve(part));
    }
    if (auto it = kv.find("damages"); it != kv.end()) {
        p.damages.clear();
        for (auto part : textio::split(it->second, ',')) {
            if (!part.empty()) p.damages.emplace_back(part);
        }
    }
    if (auto it = kv.find("strategies"); it != kv.end()) {
        p.strategies.clear();
        for (auto part : textio::split(it->second, ',')) {
            if (!part.empty()) p.strategies.push_back(strategy_by_name(std::string(part)));
        }
    }
    p.replicates = static_cast<int>(kv_int(kv, "replicates", p.replicates));
    p.trials = static_cast<int>(kv_int(kv, "trials", p.trials));
    p.base_seed = static_cast<std::uint64_t>(kv_int(kv, "base_seed", 1));
    p.stop_ratio = kv_double(kv, "stop_ratio", p.stop_ratio);
    p.kernel.length_scale = kv_double(kv, "kernel_length_scale", p.kernel.length_scale);
    p.kernel.signal_variance = kv_double(kv, "kernel_signal_variance", p.kernel.signal_variance);
    p.kernel.noise_variance = kv_double(kv, "kernel_noise_variance", p.kernel.noise_variance);
    std::string ccfg = kv_string(kv, "crawler_config", "");
    if (!ccfg.empty()) p.crawler_config = resolve(ccfg);
    p.validate();
    return p;
}

ExecuteFn make_crawler_executor(const CrawlerConfig& cfg, const DamageSpec& damage) {
    return [cfg, damage](const Genotype& g) {
        SimResult r = measure_with_damage(cfg, g, damage);
        return Execution{r.speed, {r.force_sum}, r.failed};
    };
}

namespace {

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

std::uint64_t replicate_seed(std::uint64_t base, std::uint64_t map_seed,
                             const std::string& damage, Strategy strategy, int replicate) {
    std::uint64_t s = seed_combine(base, map_seed);
    s = seed_combine(s, fnv1a64(damage));
    s = seed_combine(s, static_cast<std::uint64_t>(strategy));
    return seed_combine(s, static_cast<std::uint64_t>(replicate));
}

std::vector<BenchRun> run_experiment(const ExperimentPlan& plan, unsigned jobs) {
    plan.validate();
    CrawlerConfig ccfg;
    if (!plan.crawler_config.empty()) ccfg = load_crawler_config(plan.crawler_config);
    ccfg.validate();

    std::vector<Archive> maps;
    maps.reserve(plan.archives.size());
    std::set<std::uint64_t> map_seeds;
    for (const auto& path : plan.archives) {
        maps.push_back(load_archive(path));
        const Archive& a = maps.back();
        if (a.filled() == 0) throw ConfigError("archive '" + path + "' has no filled cells");
        if (a.genotype_size() != crawler_genotype_size(ccfg)) {
            throw ConfigError("archive '" + path + "' genotype size does not match the crawler");
        }
        if (!map_seeds.insert(a.meta.seed).second) {
            throw ConfigError("two archives share map seed " + std::to_string(a.meta.seed));
        }
    }
    std::vector<DamageSpec> dmg;
    for (const auto& name : plan.damages) dmg.push_back(damage_by_name(name));

    struct Cell {
        std::size_t map, di, si;
        int rep;
    };
    std::vector<Cell> grid;
    for (std::size_t m = 0; m < maps.size(); ++m) {
        for (std::size_t d = 0; d < plan.damages.size(); ++d) {
            for (std::size_t s = 0; s < plan.strategies.size(); ++s) {
                for (int r = 1; r <= plan.replicates; ++r) grid.push_back({m, d, s, r});
            }
        }
    }

    std::vector<BenchRun> out(grid.size());
    std::vector<std::exception_ptr> errs(grid.size());
    parallel_for(grid.size(), jobs, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            try {
                const Cell& c = grid[i];
                const Archive& arch = maps[c.map];
                AdaptationConfig acfg;
                acfg.max_trials = plan.trials;
                acfg.stop_ratio = plan.stop_ratio;
                acfg.kernel = plan.kernel;
                acfg.strategy = plan.strategies[c.si];
                acfg.constraints = {{"force_sum", arch.meta.safety_threshold}};
                acfg.seed = replicate_seed(plan.base_seed, arch.meta.seed, plan.damages[c.di],
                                           acfg.strategy, c.rep);
                TrialLog log = adapt(arch, make_crawler_executor(ccfg, dmg[c.di]), acfg);

                BenchRun& run = out[i];
                run.record = {arch.meta.seed,       plan.damages[c.di], acfg.strategy,
                              c.rep,                log.best_safe_performance,
                              log.unsafe_count,     static_cast<int>(log.trials.size())};
                run.seed = acfg.seed;
                run.log = std::move(log);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    });
    for (auto& e : errs) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

std::string run_file_name(const RunRecord& r) {
    std::string rep = std::to_string(r.replicate);
    if (rep.size() < 2) rep.insert(0, "0");
    return "run_map" + std::to_string(r.map_seed) + "_" + r.damage + "_" +
           strategy_name(r.strategy) + "_rep" + rep + ".csv";
}

bool parse_run_file_name(const std::string& name, RunRecord& out) {
    if (name.size() < 12 || name.substr(0, 4) != "run_" ||
        name.substr(name.size() - 4) != ".csv") {
        return false;
    }
    auto body = name.substr(4, name.size() - 8);
    auto parts = textio::split(body, '_');
    if (parts.size() != 4) return false;
    if (parts[0].substr(0, 3) != "map" || parts[3].substr(0, 3) != "rep") return false;
    try {
        out.map_seed = textio::parse_u64(parts[0].substr(3), "map seed", 0);
        out.damage = std::string(parts[1]);
        out.strategy = strategy_by_name(std::string(parts[2]));
        out.replicate = static_cast<int>(textio::parse_u64(parts[3].substr(3), "replicate", 0));
    } catch (const std::exception&) {
        return false;
    }
    return true;
}

double median(std::vector<double> v) {
    if (v.empty()) throw InvalidArgument("median of an empty sample");
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    if (n % 2) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

namespace {

// positions sorted by value; equal runs share the average of their 1-based ranks
std::vector<double> midranks(const std::vector<double>& sorted) {
    std::vector<double> r(sorted.size());
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        double mid = 0.5 * static_cast<double>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k) r[k] = mid;
        i = j + 1;
    }
    return r;
}

double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    }
    return c;
}

bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
    std::size_t k = c.size();
    for (std::size_t i = k; i-- > 0;) {
        if (c[i] != i + n - k) {
            ++c[i];
            for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

} // namespace

MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw InvalidArgument("rank test needs non-empty samples");
    for (double v : a) {
        if (std::isnan(v)) throw InvalidArgument("rank test rejects NaN");
    }
    for (double v : b) {
        if (std::isnan(v)) throw InvalidArgument("rank test rejects NaN");
    }
    const std::size_t na = a.size(), nb = b.size(), n = na + nb;

    std::vector<std::pair<double, int>> pool;
    pool.reserve(n);
    for (double v : a) pool.push_back({v, 0});
    for (double v : b) pool.push_back({v, 1});
    std::stable_sort(pool.begin(), pool.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = pool[i].first;
    std::vector<double> ranks = midranks(values);

    double ra = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (pool[i].second == 0) ra += ranks[i];
    }
    double u = ra - 0.5 * static_cast<double>(na) * static_cast<double>(na + 1);
    double mu = 0.5 * static_cast<double>(na) * static_cast<double>(nb);
    double dev = std::fabs(u - mu);

    std::size_t k = std::min(na, nb);
    bool exact = (na < 8 || nb < 8) && binomial(n, k) <= 5e6;
    if (exact) {
        // permutation of the pooled multiset: count rank assignments at
        // least as extreme as the observed deviation from the mean
        long long hits = 0, total = 0;
        std::vector<std::size_t> comb(k);
        for (std::size_t i = 0; i < k; ++i) comb[i] = i;
        do {
            double r = 0.0;
            for (std::size_t idx : comb) r += ranks[idx];
            double us = r - 0.5 * static_cast<double>(k) * static_cast<double>(k + 1);
            if (std::fabs(us - mu) >= dev - 1e-9) ++hits;
            ++total;
        } while (next_combination(comb, n));
        return {u, static_cast<double>(hits) / static_cast<double>(total)};
    }

    double tie_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[j + 1] == values[i]) ++j;
        double t = static_cast<double>(j - i + 1);
        tie_sum += t * t * t - t;
        i = j + 1;
    }
    double var = (static_cast<double>(na) * static_cast<double>(nb) / 12.0) *
                 (static_cast<double>(n + 1) -
                  tie_sum / (static_cast<double>(n) * static_cast<double>(n - 1)));
    if (!(var > 0.0)) return {u, 1.0}; // every pooled value identical
    double z = std::max(0.0, dev - 0.5) / std::sqrt(var);
    return {u, 2.0 * normal_cdf(-z)};
}

namespace {

constexpr Strategy kStrategyOrder[] = {Strategy::ITE, Strategy::MO_ITE, Strategy::SITE};

struct Group {
    std::vector<double> best_safe;
    std::vector<double> unsafe;
};

std::string fmt(double v) {
    std::string s;
    append_double(s, v);
    return s;
}

} // namespace

Summary summarize(std::vector<RunRecord> records) {
    if (records.empty()) throw InvalidArgument("no runs to summarize");
    std::sort(records.begin(), records.end(), [](const RunRecord& x, const RunRecord& y) {
        return std::tie(x.damage, x.strategy, x.map_seed, x.replicate) <
               std::tie(y.damage, y.strategy, y.map_seed, y.replicate);
    });

    std::string raw = "map_seed,damage,strategy,replicate,best_safe,unsafe_count,trials\n";
    for (const RunRecord& r : records) {
        raw += std::to_string(r.map_seed) + ',' + r.damage + ',' + strategy_name(r.strategy) +
               ',' + std::to_string(r.replicate) + ',';
        append_double(raw, r.best_safe);
        raw += ',' + std::to_string(r.unsafe) + ',' + std::to_string(r.trials) + '\n';
    }

    std::vector<std::string> damages;
    std::vector<std::uint64_t> map_ids;
    std::set<Strategy> present;
    std::map<std::tuple<std::string, Strategy, std::uint64_t>, Group> per_map;
    std::map<std::pair<std::string, Strategy>, Group> pooled;
    for (const RunRecord& r : records) {
        if (damages.empty() || damages.back() != r.damage) damages.push_back(r.damage);
        if (std::find(map_ids.begin(), map_ids.end(), r.map_seed) == map_ids.end()) {
            map_ids.push_back(r.map_seed);
        }
        present.insert(r.strategy);
        auto& g = per_map[{r.damage, r.strategy, r.map_seed}];
        g.best_safe.push_back(r.best_safe);
        g.unsafe.push_back(static_cast<double>(r.unsafe));
        auto& p = pooled[{r.damage, r.strategy}];
        p.best_safe.push_back(r.best_safe);
        p.unsafe.push_back(static_cast<double>(r.unsafe));
    }
    std::sort(damages.begin(), damages.end());
    damages.erase(std::unique(damages.begin(), damages.end()), damages.end());
    std::sort(map_ids.begin(), map_ids.end());

    Summary out;
    out.raw_csv = std::move(raw);
    out.summary_csv = "strategy,damage,map,median_best_safe,median_unsafe,replicates\n";

    auto add_row = [&out](Strategy s, const std::string& damage, const std::string& map,
                          const Group& g) {
        SummaryRow row;
        row.strategy = s;
        row.damage = damage;
        row.map = map;
        row.median_best_safe = median(g.best_safe);
        row.median_unsafe = median(g.unsafe);
        row.best_safe = g.best_safe;
        row.unsafe = g.unsafe;
        out.summary_csv += std::string(strategy_name(s)) + ',' + damage + ',' + map + ',' +
                           fmt(row.median_best_safe) + ',' + fmt(row.median_unsafe) + ',' +
                           std::to_string(g.best_safe.size()) + '\n';
        out.rows.push_back(std::move(row));
    };

    std::string rep;
    rep += "Ordering comparison: damage recovery strategies on the planar crawler\n";
    rep += "======================================================================\n\n";
    rep += "Metrics per run: best safe crawling speed (m/s) and the number of\n";
    rep += "trials whose force sum exceeded the map's frozen safety threshold.\n";
    rep += "Medians pool every map and replicate of a damage case; per-map\n";
    rep += "breakdowns follow each block. Rank tests are two-sided Mann-Whitney.\n\n";
    rep += "Note: results come from a reduced-order planar simulator, so absolute\n";
    rep += "speeds and forces are not comparable to hardware numbers; only the\n";
    rep += "orderings and rank tests are meaningful here.\n";

    for (const std::string& damage : damages) {
        rep += "\ndamage " + damage + "\n";
        for (Strategy s : kStrategyOrder) {
            if (!present.count(s)) continue;
            auto it = pooled.find({damage, s});
            if (it == pooled.end()) continue;
            const Group& g = it->second;
            for (std::uint64_t m : map_ids) {
                auto pm = per_map.find({damage, s, m});
                if (pm != per_map.end()) add_row(s, damage, std::to_string(m), pm->second);
            }
            add_row(s, damage, "pooled", g);
            rep += "  " + std::string(strategy_name(s)) + ": median unsafe " +
                   fmt(median(g.unsafe)) + ", median best safe " + fmt(median(g.best_safe)) +
                   " (n=" + std::to_string(g.unsafe.size()) + ")\n";
        }
        for (Strategy base : {Strategy::ITE, Strategy::MO_ITE}) {
            if (!present.count(Strategy::SITE) || !present.count(base)) continue;
            auto si = pooled.find({damage, Strategy::SITE});
            auto bi = pooled.find({damage, base});
            if (si == pooled.end() || bi == pooled.end()) continue;
            MwuResult un = mann_whitney_u(si->second.unsafe, bi->second.unsafe);
            MwuResult bs = mann_whitney_u(si->second.best_safe, bi->second.best_safe);
            rep += "  site vs " + std::string(strategy_name(base)) + ": unsafe U=" + fmt(un.u) +
                   " p=" + fmt(un.p) + "; best safe U=" + fmt(bs.u) + " p=" + fmt(bs.p) + "\n";
        }
        for (std::uint64_t m : map_ids) {
            std::string line = "  map " + std::to_string(m) + " median unsafe:";
            bool any = false;
            for (Strategy s : kStrategyOrder) {
                auto pm = per_map.find({damage, s, m});
                if (pm == per_map.end()) continue;
                line += " " + std::string(strategy_name(s)) + "=" + fmt(median(pm->second.unsafe));
                any = true;
            }
            if (any) rep += line + "\n";
        }
    }
    out.report = std::move(rep);
    return out;
}

} // namespace sitemap
