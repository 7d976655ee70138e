#include <CLI11.hpp>

#include "sitemap/adaptation.hpp"
#include "sitemap/archive.hpp"
#include "sitemap/bench.hpp"
#include "sitemap/crawler.hpp"
#include "sitemap/errors.hpp"
#include "sitemap/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace sitemap;

namespace {

CrawlerConfig crawler_from(const std::string& path) {
    CrawlerConfig cfg;
    if (!path.empty()) cfg = load_crawler_config(path);
    cfg.validate();
    return cfg;
}

void write_text(const fs::path& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open '" + path.string() + "' for writing");
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw DataError("write failed for '" + path.string() + "'");
}

int cmd_mapgen(const std::string& config, std::uint64_t seed, std::uint64_t budget,
               const std::string& out) {
    CrawlerConfig ccfg = crawler_from(config);
    MapElitesConfig mc;
    mc.seed = seed;
    mc.budget = budget;
    mc.genotype_size = crawler_genotype_size(ccfg);
    std::size_t last_report = 0;
    mc.on_batch = [&last_report](const Archive& a, std::size_t done) {
        if (done - last_report < 20000) return;
        last_report = done;
        std::cerr << "evaluated " << done << ", filled " << a.filled() << "\n";
    };
    auto evaluate = [&ccfg](const Genotype& g) {
        SimResult r = measure_with_damage(ccfg, g, {});
        return EvalResult{r.speed, r.duty, {r.force_sum}, r.failed};
    };
    Archive arch = run_map_elites(evaluate, mc);
    save_archive(arch, out);
    std::cout << out << ": filled " << arch.filled() << "/" << arch.cell_count() << ", best "
              << arch.best_performance() << " m/s, safety threshold "
              << arch.meta.safety_threshold << " N, failures " << arch.meta.failures << "\n";
    return 0;
}

int cmd_adapt(const std::string& archive_path, const std::string& damage,
              const std::string& strategy, int trials, std::uint64_t seed,
              double stop_ratio, const std::string& config, const std::string& out) {
    Archive arch = load_archive(archive_path);
    CrawlerConfig ccfg = crawler_from(config);
    if (arch.genotype_size() != crawler_genotype_size(ccfg)) {
        throw ConfigError("archive genotype size does not match the crawler configuration");
    }
    AdaptationConfig acfg;
    acfg.max_trials = trials;
    acfg.stop_ratio = stop_ratio;
    acfg.strategy = strategy_by_name(strategy);
    acfg.seed = seed;
    acfg.constraints = {{"force_sum", arch.meta.safety_threshold}};
    TrialLog log = adapt(arch, make_crawler_executor(ccfg, damage_by_name(damage)), acfg);
    save_trial_log(out, log, acfg.strategy, acfg.constraints.size());
    std::cout << out << ": " << log.trials.size() << " trials, " << log.unsafe_count
              << " unsafe, best safe " << log.best_safe_performance << " m/s\n";
    return 0;
}

int cmd_bench(const std::string& plan_path, const std::string& out_dir, unsigned jobs) {
    ExperimentPlan plan = load_plan(plan_path);
    auto runs = run_experiment(plan, jobs);
    fs::create_directories(out_dir);
    std::vector<RunRecord> records;
    records.reserve(runs.size());
    for (const BenchRun& r : runs) {
        save_trial_log((fs::path(out_dir) / run_file_name(r.record)).string(), r.log,
                       r.record.strategy, 1);
        records.push_back(r.record);
    }
    Summary s = summarize(std::move(records));
    write_text(fs::path(out_dir) / "raw.csv", s.raw_csv);
    write_text(fs::path(out_dir) / "summary.csv", s.summary_csv);
    write_text(fs::path(out_dir) / "report.txt", s.report);
    std::cout << runs.size() << " runs -> " << out_dir << "\n";
    return 0;
}

int cmd_stats(const std::string& in_dir, const std::string& out) {
    std::vector<RunRecord> records;
    for (const auto& entry : fs::directory_iterator(in_dir)) {
        if (!entry.is_regular_file()) continue;
        RunRecord rec;
        if (!parse_run_file_name(entry.path().filename().string(), rec)) continue;
        LoadedTrialLog loaded = load_trial_log(entry.path().string());
        if (loaded.strategy != rec.strategy) {
            throw DataError(entry.path().string() + ": file name and rows disagree on the strategy");
        }
        rec.best_safe = loaded.log.best_safe_performance;
        rec.unsafe = loaded.log.unsafe_count;
        rec.trials = static_cast<int>(loaded.log.trials.size());
        records.push_back(std::move(rec));
    }
    if (records.empty()) throw DataError("no run logs found in '" + in_dir + "'");
    Summary s = summarize(std::move(records));
    write_text(out, s.summary_csv);
    std::cout << out << ": " << s.rows.size() << " summary rows\n";
    return 0;
}

int cmd_sim(const std::string& config, const std::string& damage, const std::string& genes,
            std::uint64_t seed, const std::string& dump) {
    CrawlerConfig ccfg = crawler_from(config);
    Genotype g;
    if (!genes.empty()) {
        std::stringstream ss(genes);
        std::string tok;
        while (std::getline(ss, tok, ',')) g.params.push_back(std::stod(tok));
    } else {
        Rng rng(seed);
        g.params.resize(crawler_genotype_size(ccfg));
        for (auto& p : g.params) p = rng.uniform01();
    }
    ControllerParams ctrl = decode(g, ccfg);
    DamageSpec dmg = damage_by_name(damage);

    std::string csv;
    std::function<void(const StepRecord&)> trace;
    if (!dump.empty()) {
        csv = "t,x,z,pitch";
        for (int j = 1; j <= 8; ++j) csv += ",theta_" + std::to_string(j);
        for (int j = 1; j <= 4; ++j) csv += ",contact_" + std::to_string(j);
        for (int j = 1; j <= 4; ++j) csv += ",fn_" + std::to_string(j);
        csv += '\n';
        trace = [&csv](const StepRecord& r) {
            csv += std::to_string(r.t) + ',' + std::to_string(r.x) + ',' + std::to_string(r.z) +
                   ',' + std::to_string(r.pitch);
            for (double v : r.theta) csv += ',' + std::to_string(v);
            for (bool c : r.contact) csv += c ? ",1" : ",0";
            for (double v : r.fn) csv += ',' + std::to_string(v);
            csv += '\n';
        };
    }
    SimResult r = simulate(ccfg, ctrl, dmg, trace);
    if (!dump.empty()) write_text(dump, csv);
    std::cout << "speed " << r.speed << " m/s, force sum " << r.force_sum << " N, duty ["
              << r.duty[0] << ", " << r.duty[1] << ", " << r.duty[2] << ", " << r.duty[3]
              << "], failed " << (r.failed ? "yes" : "no") << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"map-based damage recovery for a planar crawler: archive generation, "
                 "safety-aware adaptation, and the strategy comparison harness"};
    app.require_subcommand(1);

    const std::vector<std::string> damage_names = {"none", "d1", "d2", "d3", "d4"};
    const std::vector<std::string> strategy_names = {"ite", "mo-ite", "site"};

    auto* mapgen = app.add_subcommand("mapgen", "generate a behavior-performance map");
    std::string mg_config, mg_out;
    std::uint64_t mg_seed = 1, mg_budget = 100000;
    mapgen->add_option("--config", mg_config, "crawler configuration file")
        ->check(CLI::ExistingFile);
    mapgen->add_option("--seed", mg_seed, "archive seed");
    mapgen->add_option("--budget", mg_budget, "total evaluations");
    mapgen->add_option("--out", mg_out, "archive output path")->required();

    auto* adapt_cmd = app.add_subcommand("adapt", "run one damage-recovery session");
    std::string ad_archive, ad_damage = "none", ad_strategy = "site", ad_config, ad_out;
    int ad_trials = 30;
    std::uint64_t ad_seed = 1;
    double ad_stop = 0.9;
    adapt_cmd->add_option("--archive", ad_archive, "behavior-performance map")
        ->required()
        ->check(CLI::ExistingFile);
    adapt_cmd->add_option("--damage", ad_damage, "damage case")
        ->check(CLI::IsMember(damage_names));
    adapt_cmd->add_option("--strategy", ad_strategy, "selection strategy")
        ->check(CLI::IsMember(strategy_names));
    adapt_cmd->add_option("--trials", ad_trials, "trial budget");
    adapt_cmd->add_option("--seed", ad_seed, "session seed");
    adapt_cmd->add_option("--stop-ratio", ad_stop, "early-stop fraction of the archive best");
    adapt_cmd->add_option("--config", ad_config, "crawler configuration file")
        ->check(CLI::ExistingFile);
    adapt_cmd->add_option("--out", ad_out, "trial log path")->required();

    auto* bench = app.add_subcommand("bench", "run the full strategy comparison");
    std::string be_plan, be_out;
    unsigned be_jobs = 0;
    bench->add_option("--plan", be_plan, "experiment plan file")
        ->required()
        ->check(CLI::ExistingFile);
    bench->add_option("--out-dir", be_out, "output directory")->required();
    bench->add_option("--jobs", be_jobs, "parallel runs (0 = hardware)");

    auto* stats = app.add_subcommand("stats", "summarize run logs in a directory");
    std::string st_in, st_out;
    stats->add_option("--in", st_in, "directory of run logs")
        ->required()
        ->check(CLI::ExistingDirectory);
    stats->add_option("--out", st_out, "summary csv path")->required();

    auto* sim = app.add_subcommand("sim", "run one crawler episode");
    std::string si_config, si_damage = "none", si_genes, si_dump;
    std::uint64_t si_seed = 1;
    sim->add_option("--config", si_config, "crawler configuration file")
        ->check(CLI::ExistingFile);
    sim->add_option("--damage", si_damage, "damage case")->check(CLI::IsMember(damage_names));
    sim->add_option("--genes", si_genes, "comma-separated genotype in [0,1]");
    sim->add_option("--seed", si_seed, "random genotype seed when --genes is absent");
    sim->add_option("--dump-trajectory", si_dump, "write per-step state as csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(mapgen)) return cmd_mapgen(mg_config, mg_seed, mg_budget, mg_out);
        if (app.got_subcommand(adapt_cmd)) {
            return cmd_adapt(ad_archive, ad_damage, ad_strategy, ad_trials, ad_seed, ad_stop,
                             ad_config, ad_out);
        }
        if (app.got_subcommand(bench)) return cmd_bench(be_plan, be_out, be_jobs);
        if (app.got_subcommand(stats)) return cmd_stats(st_in, st_out);
        if (app.got_subcommand(sim)) return cmd_sim(si_config, si_damage, si_genes, si_seed, si_dump);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
