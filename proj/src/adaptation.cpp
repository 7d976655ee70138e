#include "sitemap/adaptation.hpp"

#include "sitemap/acquisition.hpp"
#include "sitemap/errors.hpp"
#include "textio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>

namespace sitemap {

using textio::append_double;
using textio::parse_double;
using textio::parse_u64;
using textio::split;
using textio::trim;

Strategy strategy_by_name(const std::string& name) {
    if (name == "ite") return Strategy::ITE;
    if (name == "mo-ite") return Strategy::MO_ITE;
    if (name == "site") return Strategy::SITE;
    throw ConfigError("unknown strategy '" + name + "'");
}

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::ITE: return "ite";
        case Strategy::MO_ITE: return "mo-ite";
        case Strategy::SITE: return "site";
    }
    throw InvalidArgument("invalid strategy value");
}

void AdaptationConfig::validate() const {
    if (max_trials < 1) throw ConfigError("max_trials must be at least 1");
    if (!(stop_ratio > 0.0 && stop_ratio <= 1.0)) throw ConfigError("stop_ratio must lie in (0,1]");
    kernel.validate();
    for (const auto& c : constraints) {
        if (!std::isfinite(c.threshold)) throw ConfigError("constraint threshold must be finite");
    }
}

Trial make_trial(int index, std::size_t cell, const Descriptor& descriptor,
                 const Execution& exec, std::span<const ConstraintSpec> constraints,
                 double acquisition_value) {
    Trial t;
    t.index = index;
    t.cell = cell;
    t.descriptor = descriptor;
    t.acquisition_value = acquisition_value;
    if (exec.failed) {
        t.measured_performance = 0.0;
        t.measured_constraints.assign(constraints.size(),
                                      -std::numeric_limits<double>::infinity());
        t.feasible = false;
        return t;
    }
    if (!std::isfinite(exec.performance)) {
        throw InvalidArgument("execution reported a non-finite performance without failing");
    }
    if (exec.measurements.size() < constraints.size()) {
        throw InvalidArgument("execution reported fewer measurements than constraints");
    }
    t.measured_performance = exec.performance;
    t.feasible = true;
    for (std::size_t i = 0; i < constraints.size(); ++i) {
        double c = constraints[i].threshold - exec.measurements[i];
        t.measured_constraints.push_back(c);
        if (!(c >= 0.0)) t.feasible = false;
    }
    return t;
}

namespace {

Posterior posterior_at(const GpModel& gp, std::span<const double> x) {
    Prediction p = gp.predict(x);
    return Posterior{p.mean, std::sqrt(p.variance)};
}

struct CellRef {
    std::size_t index;
    const Elite* elite;
};

std::vector<CellRef> filled_cells(const Archive& archive) {
    std::vector<CellRef> out;
    out.reserve(archive.filled());
    for (std::size_t idx : archive.filled_indices()) out.push_back({idx, archive.cell(idx)});
    return out;
}

// ascending scan with strict improvement keeps the lowest index on ties
std::optional<Selection> argmax_eci(const std::vector<CellRef>& cells, const GpModel& gp_f,
                                    std::span<const GpModel> gp_c, double incumbent,
                                    const std::vector<char>* tested) {
    std::optional<Selection> best;
    std::vector<Posterior> cons(gp_c.size());
    for (const CellRef& c : cells) {
        if (tested && (*tested)[c.index]) continue;
        std::span<const double> x{c.elite->descriptor.v};
        Posterior obj = posterior_at(gp_f, x);
        for (std::size_t i = 0; i < gp_c.size(); ++i) cons[i] = posterior_at(gp_c[i], x);
        double a = expected_constrained_improvement(obj, cons, incumbent);
        if (!best || a > best->acquisition) best = Selection{c.index, a};
    }
    return best;
}

std::optional<Selection> argmax_ehvi(const std::vector<CellRef>& cells, const GpModel& gp_f,
                                     const GpModel& gp_g, const ParetoFront2& front,
                                     const std::vector<char>* tested) {
    std::optional<Selection> best;
    for (const CellRef& c : cells) {
        if (tested && (*tested)[c.index]) continue;
        std::span<const double> x{c.elite->descriptor.v};
        double a = ehvi_2d(posterior_at(gp_f, x), posterior_at(gp_g, x), front);
        if (!best || a > best->acquisition) best = Selection{c.index, a};
    }
    return best;
}

// priors are cell lookups: candidates and observations only ever sit on
// stored cell descriptors, so no interpolation is defined or needed
PriorMean performance_prior(const Archive& archive) {
    return [&archive](std::span<const double> x) {
        Descriptor d;
        std::copy(x.begin(), x.end(), d.v.begin());
        const Elite* e = archive.cell(discretize(d, archive.resolution()));
        if (!e) throw InvalidArgument("gp prior queried off the stored cells");
        return e->performance;
    };
}

PriorMean margin_prior(const Archive& archive, double threshold, std::size_t which) {
    return [&archive, threshold, which](std::span<const double> x) {
        Descriptor d;
        std::copy(x.begin(), x.end(), d.v.begin());
        const Elite* e = archive.cell(discretize(d, archive.resolution()));
        if (!e) throw InvalidArgument("gp prior queried off the stored cells");
        return threshold - e->safety_values[which];
    };
}

PriorMean negated_force_prior(const Archive& archive, double norm) {
    return [&archive, norm](std::span<const double> x) {
        Descriptor d;
        std::copy(x.begin(), x.end(), d.v.begin());
        const Elite* e = archive.cell(discretize(d, archive.resolution()));
        if (!e) throw InvalidArgument("gp prior queried off the stored cells");
        return -e->safety_values[0] / norm;
    };
}

} // namespace

Selection select_next_site(const Archive& archive, const GpModel& gp_f,
                           std::span<const GpModel> gp_c, double incumbent) {
    if (archive.filled() == 0) throw ConfigError("selection needs a non-empty archive");
    if (gp_f.dim() != kDescriptorDims) throw InvalidArgument("gp dimension mismatch");
    for (const GpModel& g : gp_c) {
        if (g.dim() != kDescriptorDims) throw InvalidArgument("gp dimension mismatch");
    }
    auto cells = filled_cells(archive);
    return *argmax_eci(cells, gp_f, gp_c, incumbent, nullptr);
}

TrialLog adapt(const Archive& archive, const ExecuteFn& execute, const AdaptationConfig& cfg) {
    cfg.validate();
    if (!execute) throw InvalidArgument("execute callback is empty");
    if (archive.filled() == 0) throw ConfigError("adaptation needs a non-empty archive");

    auto cells = filled_cells(archive);
    const std::size_t nc = cfg.constraints.size();
    if (cfg.strategy == Strategy::MO_ITE && nc == 0) {
        throw ConfigError("mo-ite needs a constraint supplying the force measurement");
    }
    std::size_t stored_needed = std::max<std::size_t>(nc, cfg.strategy == Strategy::MO_ITE ? 1 : 0);
    for (const CellRef& c : cells) {
        if (c.elite->safety_values.size() < stored_needed) {
            throw ConfigError("archive stores fewer safety values than the constraints need");
        }
    }

    GpModel gp_f(kDescriptorDims, cfg.kernel, performance_prior(archive));
    std::vector<GpModel> gp_c;
    if (cfg.strategy == Strategy::SITE) {
        gp_c.reserve(nc);
        for (std::size_t i = 0; i < nc; ++i) {
            gp_c.emplace_back(kDescriptorDims, cfg.kernel,
                              margin_prior(archive, cfg.constraints[i].threshold, i));
        }
    }

    // second objective of mo-ite: negated force in the archive's normalized
    // units, so neither axis dwarfs the other in hypervolume. The front is
    // anchored 10% of the stored spread below the worst archived point.
    const double fnorm = archive.meta.force_norm_max > 0.0 ? archive.meta.force_norm_max : 1.0;
    GpModel gp_g(kDescriptorDims, cfg.kernel, negated_force_prior(archive, fnorm));
    ParetoFront2 front;
    if (cfg.strategy == Strategy::MO_ITE) {
        double pmin = cells.front().elite->performance, pmax = pmin;
        double fmin = cells.front().elite->safety_values[0], fmax = fmin;
        for (const CellRef& c : cells) {
            pmin = std::min(pmin, c.elite->performance);
            pmax = std::max(pmax, c.elite->performance);
            fmin = std::min(fmin, c.elite->safety_values[0]);
            fmax = std::max(fmax, c.elite->safety_values[0]);
        }
        double pspan = pmax > pmin ? pmax - pmin : 1.0;
        double fspan = fmax > fmin ? (fmax - fmin) / fnorm : 1.0;
        front.reference = {pmin - 0.1 * pspan, -fmax / fnorm - 0.1 * fspan};
    }

    TrialLog log;
    std::vector<char> tested(archive.cell_count(), 0);
    const double archive_best = archive.best_performance();
    // best non-failed performance; crashes contribute no incumbent
    double observed_best = kNoFeasibleIncumbent;

    for (int t = 1; t <= cfg.max_trials; ++t) {
        std::optional<Selection> sel;
        switch (cfg.strategy) {
            case Strategy::SITE:
                sel = argmax_eci(cells, gp_f, gp_c, log.best_safe_performance, &tested);
                break;
            case Strategy::ITE:
                sel = argmax_eci(cells, gp_f, {}, observed_best, &tested);
                break;
            case Strategy::MO_ITE:
                sel = argmax_ehvi(cells, gp_f, gp_g, front, &tested);
                break;
        }
        if (!sel) break; // every filled cell has been tried

        const Elite* elite = archive.cell(sel->cell);
        Execution ex = execute(elite->genotype);
        Trial tr = make_trial(t, sel->cell, elite->descriptor, ex, cfg.constraints,
                              sel->acquisition);

        if (!tr.feasible) ++log.unsafe_count;
        if (tr.feasible && tr.measured_performance > log.best_safe_performance) {
            log.best_safe_performance = tr.measured_performance;
        }
        tested[sel->cell] = 1;

        std::span<const double> x{elite->descriptor.v};
        if (ex.failed) {
            // the fall itself is a genuine zero-speed observation; the
            // constraint gps get nothing, -inf is a sentinel not a value
            gp_f.add(x, 0.0);
        } else {
            gp_f.add(x, ex.performance);
            for (std::size_t i = 0; i < gp_c.size(); ++i) gp_c[i].add(x, tr.measured_constraints[i]);
            if (cfg.strategy == Strategy::MO_ITE) {
                gp_g.add(x, -ex.measurements[0] / fnorm);
                front = pareto_insert(front, {ex.performance, -ex.measurements[0] / fnorm});
            }
            if (ex.performance > observed_best) observed_best = ex.performance;
        }

        log.trials.push_back(std::move(tr));
        if (cfg.stop_ratio < 1.0 &&
            log.best_safe_performance >= cfg.stop_ratio * archive_best) {
            break;
        }
    }
    return log;
}

void save_trial_log(const std::string& path, const TrialLog& log, Strategy strategy,
                    std::size_t constraint_count) {
    std::string out = "trial,cell,strategy,performance,feasible";
    for (std::size_t i = 1; i <= constraint_count; ++i) out += ",constraint_" + std::to_string(i);
    out += ",acquisition\n";
    for (const Trial& t : log.trials) {
        if (t.measured_constraints.size() != constraint_count) {
            throw InvalidArgument("trial constraint count does not match the header");
        }
        out += std::to_string(t.index);
        out += ',';
        out += std::to_string(t.cell);
        out += ',';
        out += strategy_name(strategy);
        out += ',';
        append_double(out, t.measured_performance);
        out += t.feasible ? ",1" : ",0";
        for (double c : t.measured_constraints) {
            out += ',';
            append_double(out, c);
        }
        out += ',';
        append_double(out, t.acquisition_value);
        out += '\n';
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open '" + path + "' for writing");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw DataError("write failed for '" + path + "'");
}

LoadedTrialLog load_trial_log(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(f, line)) throw DataError("'" + path + "': empty file");

    auto header = split(trim(line), ',');
    if (header.size() < 6 || header[0] != "trial" || header[1] != "cell" ||
        header[2] != "strategy" || header[3] != "performance" || header[4] != "feasible" ||
        header.back() != "acquisition") {
        throw DataError("'" + path + "': unrecognized trial log header");
    }
    std::size_t nc = header.size() - 6;
    for (std::size_t i = 0; i < nc; ++i) {
        if (header[5 + i] != "constraint_" + std::to_string(i + 1)) {
            throw DataError("'" + path + "': unrecognized trial log header");
        }
    }

    LoadedTrialLog out;
    out.constraint_count = nc;
    bool strategy_set = false;
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        auto fields = split(sv, ',');
        if (fields.size() != 6 + nc) {
            throw DataError("line " + std::to_string(lineno) + ": expected " +
                            std::to_string(6 + nc) + " columns, got " +
                            std::to_string(fields.size()));
        }
        Trial t;
        t.index = static_cast<int>(parse_u64(fields[0], "trial index", lineno));
        t.cell = parse_u64(fields[1], "cell", lineno);
        Strategy s;
        if (fields[2] == "ite") s = Strategy::ITE;
        else if (fields[2] == "mo-ite") s = Strategy::MO_ITE;
        else if (fields[2] == "site") s = Strategy::SITE;
        else throw DataError("line " + std::to_string(lineno) + ": bad strategy '" + std::string(fields[2]) + "'");
        if (!strategy_set) {
            out.strategy = s;
            strategy_set = true;
        } else if (s != out.strategy) {
            throw DataError("line " + std::to_string(lineno) + ": mixed strategies in one log");
        }
        t.measured_performance = parse_double(fields[3], "performance", lineno);
        if (fields[4] == "1") t.feasible = true;
        else if (fields[4] == "0") t.feasible = false;
        else throw DataError("line " + std::to_string(lineno) + ": bad feasible flag '" + std::string(fields[4]) + "'");
        for (std::size_t i = 0; i < nc; ++i) {
            t.measured_constraints.push_back(parse_double(fields[5 + i], "constraint", lineno));
        }
        if (nc > 0) {
            bool margins_ok = true;
            for (double c : t.measured_constraints) {
                if (!(c >= 0.0)) margins_ok = false;
            }
            if (margins_ok != t.feasible) {
                throw DataError("line " + std::to_string(lineno) +
                                ": feasible flag contradicts the margins");
            }
        }
        t.acquisition_value = parse_double(fields[5 + nc], "acquisition", lineno);

        if (!t.feasible) ++out.log.unsafe_count;
        if (t.feasible && t.measured_performance > out.log.best_safe_performance) {
            out.log.best_safe_performance = t.measured_performance;
        }
        out.log.trials.push_back(std::move(t));
    }
    return out;
}

} // namespace sitemap
