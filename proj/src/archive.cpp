#include "sitemap/archive.hpp"

#include "sitemap/errors.hpp"
#include "sitemap/parallel.hpp"
#include "sitemap/rng.hpp"
#include "textio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace sitemap {

using textio::append_double;
using textio::parse_double;
using textio::parse_u64;
using textio::split;
using textio::trim;

namespace {

// nearest-rank percentile: the ceil(q*N)-th order statistic
double percentile(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
    rank = std::clamp<std::size_t>(rank, 1, v.size());
    return v[rank - 1];
}

void validate_elite(const Elite& e, std::size_t genotype_size) {
    for (double d : e.descriptor.v) {
        if (!(d >= 0.0 && d <= 1.0)) throw InvalidArgument("elite descriptor outside [0,1]");
    }
    if (!std::isfinite(e.performance)) throw InvalidArgument("elite performance not finite");
    if (e.safety_values.empty()) throw InvalidArgument("elite has no safety values");
    for (double s : e.safety_values) {
        if (!(std::isfinite(s) && s >= 0.0)) throw InvalidArgument("elite safety value invalid");
    }
    if (e.genotype.params.size() != genotype_size) throw InvalidArgument("elite genotype size mismatch");
    for (double g : e.genotype.params) {
        if (!(g >= 0.0 && g <= 1.0)) throw InvalidArgument("elite genotype outside [0,1]");
    }
}

} // namespace

std::size_t discretize(const Descriptor& d, const Resolution& res) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < kDescriptorDims; ++k) {
        double scaled = std::floor(d.v[k] * static_cast<double>(res[k]));
        auto bin = static_cast<std::size_t>(std::max(0.0, scaled));
        if (bin >= res[k]) bin = res[k] - 1;
        idx = idx * res[k] + bin;
    }
    return idx;
}

Archive::Archive(Resolution res, std::size_t genotype_size)
    : res_(res), genotype_size_(genotype_size) {
    std::size_t product = 1;
    for (std::size_t r : res_) {
        if (r == 0) throw InvalidArgument("archive resolution must be positive");
        if (product > 10'000'000 / r) throw InvalidArgument("archive resolution too large");
        product *= r;
    }
    if (genotype_size_ == 0) throw InvalidArgument("genotype size must be positive");
    cells_.resize(product);
}

const Elite* Archive::cell(std::size_t idx) const {
    if (idx >= cells_.size()) return nullptr;
    return cells_[idx] ? &*cells_[idx] : nullptr;
}

bool Archive::insert_if_better(Elite candidate) {
    validate_elite(candidate, genotype_size_);
    std::size_t idx = cell_index(candidate.descriptor);
    auto& slot = cells_[idx];
    if (slot && !(candidate.performance > slot->performance)) return false;
    if (!slot) ++filled_;
    slot = std::move(candidate);
    return true;
}

std::vector<std::size_t> Archive::filled_indices() const {
    std::vector<std::size_t> out;
    out.reserve(filled_);
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        if (cells_[i]) out.push_back(i);
    }
    return out;
}

double Archive::best_performance() const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : cells_) {
        if (c && c->performance > best) best = c->performance;
    }
    return best;
}

Archive run_map_elites(const EvaluateFn& evaluate, const MapElitesConfig& cfg) {
    if (cfg.init_count < 1) throw InvalidArgument("init_count must be at least 1");
    if (cfg.budget < cfg.init_count) throw InvalidArgument("budget must cover the init batch");
    if (!(cfg.mutation_sigma >= 0.0)) throw InvalidArgument("mutation sigma must be non-negative");
    if (cfg.batch_size < 1) throw InvalidArgument("batch size must be at least 1");
    if (!(cfg.safety_quantile > 0.0 && cfg.safety_quantile <= 1.0)) {
        throw InvalidArgument("safety quantile must lie in (0,1]");
    }

    Archive arch(cfg.resolution, cfg.genotype_size);
    arch.meta.seed = cfg.seed;
    arch.meta.budget = cfg.budget;
    Rng rng(cfg.seed);

    std::uint64_t failures = 0;
    std::size_t done = 0;
    std::vector<Genotype> cands;
    std::vector<EvalResult> results;

    auto fresh = [&] {
        Genotype g;
        g.params.resize(cfg.genotype_size);
        for (auto& p : g.params) p = rng.uniform01();
        return g;
    };

    auto evaluate_batch = [&](std::size_t count) {
        results.assign(count, {});
        parallel_for(count, cfg.threads, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) results[i] = evaluate(cands[i]);
        });
    };

    auto insert_batch = [&](std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) {
            const auto& r = results[i];
            if (r.failed || r.safety_values.empty()) {
                ++failures;
                continue;
            }
            Elite e;
            e.genotype = std::move(cands[i]);
            for (std::size_t k = 0; k < 4; ++k) e.descriptor.v[k] = std::clamp(r.duty[k], 0.0, 1.0);
            e.descriptor.v[4] =
                std::clamp(r.safety_values[0] / arch.meta.force_norm_max, 0.0, 1.0);
            e.performance = r.performance;
            e.safety_values = r.safety_values;
            arch.insert_if_better(std::move(e));
        }
        done += count;
        if (cfg.on_batch) cfg.on_batch(arch, done);
    };

    // Init batch: measured in full before any insertion, because the force
    // normalizer and the safety threshold are percentiles of this batch.
    cands.clear();
    for (std::size_t i = 0; i < cfg.init_count; ++i) cands.push_back(fresh());
    evaluate_batch(cfg.init_count);

    std::vector<double> forces;
    for (const auto& r : results) {
        if (!r.failed && !r.safety_values.empty()) forces.push_back(r.safety_values[0]);
    }
    double fnm = cfg.force_norm_max > 0.0 ? cfg.force_norm_max : percentile(forces, 0.99);
    if (!(fnm > 0.0)) fnm = 1.0;
    arch.meta.force_norm_max = fnm;
    arch.meta.safety_threshold = percentile(forces, cfg.safety_quantile);
    insert_batch(cfg.init_count);

    while (done < cfg.budget) {
        std::size_t count = std::min(cfg.batch_size, cfg.budget - done);
        auto parents = arch.filled_indices();
        cands.clear();
        for (std::size_t i = 0; i < count; ++i) {
            if (parents.empty()) {
                cands.push_back(fresh());
                continue;
            }
            const Elite* parent = arch.cell(parents[rng.uniform_index(parents.size())]);
            Genotype g = parent->genotype;
            for (auto& p : g.params) {
                p = std::clamp(p + cfg.mutation_sigma * rng.normal(), 0.0, 1.0);
            }
            cands.push_back(std::move(g));
        }
        evaluate_batch(count);
        insert_batch(count);
    }

    arch.meta.failures = failures;
    return arch;
}

void save_archive(const Archive& archive, const std::string& path) {
    std::string out;
    out += "sitemap-archive v1; dims=5; res=";
    for (std::size_t k = 0; k < kDescriptorDims; ++k) {
        if (k) out += ',';
        out += std::to_string(archive.resolution()[k]);
    }
    out += "; G=" + std::to_string(archive.genotype_size());
    out += "; force_norm_max=";
    append_double(out, archive.meta.force_norm_max);
    out += "; seed=" + std::to_string(archive.meta.seed);
    out += '\n';

    out += "# budget=" + std::to_string(archive.meta.budget) + '\n';
    out += "# damage=" + archive.meta.damage + '\n';
    out += "# sim=" + archive.meta.sim + '\n';
    out += "# safety_threshold=";
    append_double(out, archive.meta.safety_threshold);
    out += '\n';
    out += "# failures=" + std::to_string(archive.meta.failures) + '\n';

    for (std::size_t idx : archive.filled_indices()) {
        const Elite* e = archive.cell(idx);
        out += std::to_string(idx);
        out += " | ";
        for (std::size_t k = 0; k < kDescriptorDims; ++k) {
            if (k) out += ' ';
            append_double(out, e->descriptor.v[k]);
        }
        out += " | ";
        append_double(out, e->performance);
        out += " | ";
        for (std::size_t k = 0; k < e->safety_values.size(); ++k) {
            if (k) out += ' ';
            append_double(out, e->safety_values[k]);
        }
        out += " | ";
        for (std::size_t k = 0; k < e->genotype.params.size(); ++k) {
            if (k) out += ' ';
            append_double(out, e->genotype.params[k]);
        }
        out += '\n';
    }

    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open '" + path + "' for writing");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw DataError("write failed for '" + path + "'");
}

namespace {

// strict sequential scanner for the header line
struct HeaderScan {
    std::string_view s;
    std::size_t pos = 0;

    void expect(std::string_view lit) {
        if (s.substr(pos, lit.size()) != lit) {
            throw DataError("archive header malformed near position " + std::to_string(pos));
        }
        pos += lit.size();
    }
    std::string_view until(char stop) {
        std::size_t end = s.find(stop, pos);
        if (end == std::string_view::npos) end = s.size();
        auto r = s.substr(pos, end - pos);
        pos = end;
        return r;
    }
    std::string_view rest() { return s.substr(pos); }
};

} // namespace

Archive load_archive(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(f, line)) throw DataError("'" + path + "': empty file");

    HeaderScan h{trim(line)};
    h.expect("sitemap-archive ");
    auto version = h.until(';');
    if (version != "v1") throw DataError("unsupported archive version '" + std::string(version) + "'");
    h.expect("; dims=");
    if (parse_u64(h.until(';'), "dims", 1) != kDescriptorDims) {
        throw DataError("archive dims mismatch, expected 5");
    }
    h.expect("; res=");
    auto res_parts = split(h.until(';'), ',');
    if (res_parts.size() != kDescriptorDims) throw DataError("archive res needs 5 entries");
    Resolution res;
    for (std::size_t k = 0; k < kDescriptorDims; ++k) {
        res[k] = parse_u64(res_parts[k], "resolution", 1);
    }
    h.expect("; G=");
    std::size_t gsize = parse_u64(h.until(';'), "G", 1);
    h.expect("; force_norm_max=");
    double fnm = parse_double(h.until(';'), "force_norm_max", 1);
    h.expect("; seed=");
    std::uint64_t seed = parse_u64(trim(h.rest()), "seed", 1);

    Archive arch(res, gsize);
    arch.meta.force_norm_max = fnm;
    arch.meta.seed = seed;

    std::set<std::size_t> seen;
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        if (sv.front() == '#') {
            auto body = trim(sv.substr(1));
            auto eq = body.find('=');
            if (eq == std::string_view::npos) continue;
            auto key = trim(body.substr(0, eq));
            auto val = trim(body.substr(eq + 1));
            if (key == "budget") arch.meta.budget = parse_u64(val, "budget", lineno);
            else if (key == "damage") arch.meta.damage = std::string(val);
            else if (key == "sim") arch.meta.sim = std::string(val);
            else if (key == "safety_threshold") arch.meta.safety_threshold = parse_double(val, "safety_threshold", lineno);
            else if (key == "failures") arch.meta.failures = parse_u64(val, "failures", lineno);
            continue;
        }

        auto fields = split(sv, '|');
        if (fields.size() != 5) {
            throw DataError("line " + std::to_string(lineno) + ": expected 5 '|'-separated fields, got " +
                            std::to_string(fields.size()));
        }
        std::size_t idx = parse_u64(fields[0], "cell index", lineno);
        if (idx >= arch.cell_count()) {
            throw DataError("line " + std::to_string(lineno) + ": cell index " + std::to_string(idx) +
                            " out of range");
        }
        if (!seen.insert(idx).second) {
            throw DataError("line " + std::to_string(lineno) + ": duplicate cell " + std::to_string(idx));
        }

        Elite e;
        auto dparts = split(fields[1], ' ');
        std::erase_if(dparts, [](std::string_view p) { return p.empty(); });
        if (dparts.size() != kDescriptorDims) {
            throw DataError("line " + std::to_string(lineno) + ": descriptor needs 5 values");
        }
        for (std::size_t k = 0; k < kDescriptorDims; ++k) {
            e.descriptor.v[k] = parse_double(dparts[k], "descriptor", lineno);
        }
        e.performance = parse_double(fields[2], "performance", lineno);
        auto sparts = split(fields[3], ' ');
        std::erase_if(sparts, [](std::string_view p) { return p.empty(); });
        for (auto p : sparts) e.safety_values.push_back(parse_double(p, "safety value", lineno));
        auto gparts = split(fields[4], ' ');
        std::erase_if(gparts, [](std::string_view p) { return p.empty(); });
        if (gparts.size() != gsize) {
            throw DataError("line " + std::to_string(lineno) + ": genotype needs " +
                            std::to_string(gsize) + " genes, got " + std::to_string(gparts.size()));
        }
        for (auto p : gparts) e.genotype.params.push_back(parse_double(p, "gene", lineno));

        if (arch.cell_index(e.descriptor) != idx) {
            throw DataError("line " + std::to_string(lineno) + ": descriptor does not discretize to cell " +
                            std::to_string(idx));
        }
        try {
            arch.insert_if_better(std::move(e));
        } catch (const InvalidArgument& ex) {
            throw DataError("line " + std::to_string(lineno) + ": " + ex.what());
        }
    }
    return arch;
}

} // namespace sitemap
