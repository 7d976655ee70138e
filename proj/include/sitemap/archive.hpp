#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sitemap {

struct Genotype {
    std::vector<double> params; // each gene in [0,1]
};

// Archive indexing space: four limb duty factors plus one normalized
// contact-force dimension, all in [0,1].
inline constexpr std::size_t kDescriptorDims = 5;

struct Descriptor {
    std::array<double, kDescriptorDims> v{};
};

struct Elite {
    Genotype genotype;
    Descriptor descriptor;
    double performance = 0.0;          // crawling speed, m/s
    std::vector<double> safety_values; // raw force sums, N
};

using Resolution = std::array<std::size_t, kDescriptorDims>;
inline constexpr Resolution kDefaultResolution = {5, 5, 5, 5, 5};

// Row-major linear cell index; each coordinate bins as
// min(floor(d * res), res - 1).
std::size_t discretize(const Descriptor& d, const Resolution& res);

struct ArchiveMeta {
    std::uint64_t seed = 0;
    std::uint64_t budget = 0;
    double force_norm_max = 1.0;
    double safety_threshold = 0.0; // frozen force-sum threshold, N
    std::string damage = "none";
    std::string sim = "crawler2d-v1";
    std::uint64_t failures = 0;
};

class Archive {
public:
    explicit Archive(Resolution res = kDefaultResolution, std::size_t genotype_size = 24);

    const Resolution& resolution() const { return res_; }
    std::size_t genotype_size() const { return genotype_size_; }
    std::size_t cell_count() const { return cells_.size(); }
    std::size_t filled() const { return filled_; }

    std::size_t cell_index(const Descriptor& d) const { return discretize(d, res_); }
    const Elite* cell(std::size_t idx) const;

    // Keeps the better performer; ties keep the occupant. Throws on an
    // invalid candidate.
    bool insert_if_better(Elite candidate);

    std::vector<std::size_t> filled_indices() const;
    double best_performance() const; // -inf when empty

    ArchiveMeta meta;

private:
    Resolution res_;
    std::size_t genotype_size_;
    std::size_t filled_ = 0;
    std::vector<std::optional<Elite>> cells_;
};

struct EvalResult {
    double performance = 0.0;
    std::array<double, 4> duty{};      // raw duty factors in [0,1]
    std::vector<double> safety_values; // raw force sums
    bool failed = false;
};

using EvaluateFn = std::function<EvalResult(const Genotype&)>;

struct MapElitesConfig {
    Resolution resolution = kDefaultResolution;
    std::size_t genotype_size = 24;
    std::size_t budget = 100000;
    std::size_t init_count = 2000;
    double mutation_sigma = 0.05;
    std::uint64_t seed = 1;
    // 0 means: set from the init batch as the 99th-percentile force sum
    // (nearest rank). A positive value freezes the normalizer up front.
    double force_norm_max = 0.0;
    double safety_quantile = 0.80;
    std::size_t batch_size = 32;
    unsigned threads = 0;
    // called after each insertion batch with the archive and evaluations done
    std::function<void(const Archive&, std::size_t)> on_batch;
};

// MAP-Elites: uniform init genotypes, then mutate uniformly chosen elites.
// Candidates are generated and inserted in batch order, so results do not
// depend on the thread count. The descriptor normalizer and the safety
// threshold are fixed once the init batch has been measured.
Archive run_map_elites(const EvaluateFn& evaluate, const MapElitesConfig& cfg);

void save_archive(const Archive& archive, const std::string& path);
Archive load_archive(const std::string& path);

} // namespace sitemap
