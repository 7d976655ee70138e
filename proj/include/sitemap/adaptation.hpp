#pragma once

#include "sitemap/archive.hpp"
#include "sitemap/gp.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace sitemap {

enum class Strategy { ITE, MO_ITE, SITE };

// CLI spellings: "ite", "mo-ite", "site".
Strategy strategy_by_name(const std::string& name);
const char* strategy_name(Strategy s);

// Upper bound on one raw safety measurement. Trials store the margin
// c = threshold - measurement, so feasible means every margin >= 0.
struct ConstraintSpec {
    std::string name;
    double threshold = 0.0;
};

// What one episode on the (possibly damaged) robot reports back.
struct Execution {
    double performance = 0.0;
    std::vector<double> measurements; // raw units, one per constraint
    bool failed = false;
};

using ExecuteFn = std::function<Execution(const Genotype&)>;

struct Trial {
    int index = 0; // 1-based
    std::size_t cell = 0;
    Descriptor descriptor;
    double measured_performance = 0.0;
    std::vector<double> measured_constraints; // margins; -inf after a failed episode
    bool feasible = false;
    double acquisition_value = 0.0;
};

struct TrialLog {
    std::vector<Trial> trials;
    double best_safe_performance = -std::numeric_limits<double>::infinity();
    int unsafe_count = 0;
};

struct AdaptationConfig {
    int max_trials = 30;
    // stop once best safe performance reaches this fraction of the archive's
    // best stored performance; 1.0 switches the early stop off
    double stop_ratio = 0.9;
    KernelParams kernel;
    std::vector<ConstraintSpec> constraints;
    Strategy strategy = Strategy::SITE;
    std::uint64_t seed = 1; // recorded for provenance; the loop itself draws nothing

    void validate() const;
};

// A failed episode is recorded infeasible with performance 0 and every
// margin at -inf; otherwise margins are threshold - measurement.
Trial make_trial(int index, std::size_t cell, const Descriptor& descriptor,
                 const Execution& exec, std::span<const ConstraintSpec> constraints,
                 double acquisition_value);

struct Selection {
    std::size_t cell = 0;
    double acquisition = 0.0;
};

// Exhaustive argmax of expected constrained improvement over the filled
// cells, ties broken by lowest cell index. Pass the no-feasible-incumbent
// sentinel to reduce the criterion to the feasibility product. Throws a
// configuration error on an empty archive.
Selection select_next_site(const Archive& archive, const GpModel& gp_f,
                           std::span<const GpModel> gp_c, double incumbent);

// Select / execute / update loop over the archive until max_trials, the
// stop ratio, or cell exhaustion. Cells are never executed twice.
TrialLog adapt(const Archive& archive, const ExecuteFn& execute, const AdaptationConfig& cfg);

// CSV with header trial,cell,strategy,performance,feasible,constraint_1..n,acquisition.
void save_trial_log(const std::string& path, const TrialLog& log, Strategy strategy,
                    std::size_t constraint_count);

struct LoadedTrialLog {
    TrialLog log;
    Strategy strategy = Strategy::SITE;
    std::size_t constraint_count = 0;
};

// Rebuilds the summary fields from the rows. Descriptors are not part of
// the file format and come back zeroed.
LoadedTrialLog load_trial_log(const std::string& path);

} // namespace sitemap
