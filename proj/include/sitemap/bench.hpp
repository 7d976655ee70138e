#pragma once

#include "sitemap/adaptation.hpp"
#include "sitemap/crawler.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sitemap {

// Comparison protocol: every strategy on every damage case of every map,
// repeated `replicates` times with derived seeds.
struct ExperimentPlan {
    std::vector<std::string> archives; // one file per map
    std::vector<std::string> damages = {"d1", "d2", "d3", "d4"};
    std::vector<Strategy> strategies = {Strategy::ITE, Strategy::MO_ITE, Strategy::SITE};
    int replicates = 20;
    int trials = 30;
    std::uint64_t base_seed = 1;
    double stop_ratio = 1.0; // the comparison runs every trial out
    KernelParams kernel;
    std::string crawler_config; // empty = built-in defaults

    void validate() const;
};

// key=value file; relative archive paths resolve against the plan's directory.
ExperimentPlan load_plan(const std::string& path);

ExecuteFn make_crawler_executor(const CrawlerConfig& cfg, const DamageSpec& damage);

// Per-run seed from run identity, not plan position, so a sub-plan
// reproduces exactly the runs the full plan would produce.
std::uint64_t replicate_seed(std::uint64_t base, std::uint64_t map_seed,
                             const std::string& damage, Strategy strategy, int replicate);

struct RunRecord {
    std::uint64_t map_seed = 0;
    std::string damage;
    Strategy strategy = Strategy::SITE;
    int replicate = 0; // 1-based
    double best_safe = 0.0;
    int unsafe = 0;
    int trials = 0;
};

struct BenchRun {
    RunRecord record;
    std::uint64_t seed = 0;
    TrialLog log;
};

// Runs the full matrix; results are indexed map-major regardless of the
// thread count. jobs = 0 means one worker per hardware thread.
std::vector<BenchRun> run_experiment(const ExperimentPlan& plan, unsigned jobs = 0);

// "run_map<seed>_<damage>_<strategy>_rep<NN>.csv"; the parse fills the
// identity fields only.
std::string run_file_name(const RunRecord& r);
bool parse_run_file_name(const std::string& name, RunRecord& out);

struct MwuResult {
    double u = 0.0; // of the first sample, midrank ties
    double p = 1.0; // two-sided
};

// Normal approximation with tie and continuity corrections at n >= 8 per
// side, exact enumeration of rank assignments below that.
MwuResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

// middle order statistic, mean of the two middles when the count is even
double median(std::vector<double> v);

struct SummaryRow {
    Strategy strategy = Strategy::SITE;
    std::string damage;
    std::string map; // archive seed, or "pooled" across maps
    double median_best_safe = 0.0;
    double median_unsafe = 0.0;
    std::vector<double> best_safe; // raw values behind the medians
    std::vector<double> unsafe;
};

struct Summary {
    std::vector<SummaryRow> rows;
    std::string summary_csv;
    std::string raw_csv;
    std::string report;
};

// Medians per (strategy, damage) with per-map breakdowns, plus pairwise
// rank tests of SITE against each baseline on both metrics.
Summary summarize(std::vector<RunRecord> records);

} // namespace sitemap
