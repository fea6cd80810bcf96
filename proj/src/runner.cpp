#include "chainlab/runner.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

namespace chainlab {

namespace fs = std::filesystem;

std::string default_out_dir() {
    if (const char* env = std::getenv("CHAINLAB_OUT"))
        return env;
    return "out";
}

namespace {

std::string csv_num(double d) {
    std::ostringstream ss;
    ss.precision(10);
    ss << d;
    return ss.str();
}

} // namespace

RunSummary run_scenario(const SimSetup& setup, const std::string& out_dir) {
    auto t0 = std::chrono::steady_clock::now();
    Engine engine(setup);
    engine.run();
    auto t1 = std::chrono::steady_clock::now();

    RunSummary summary;
    summary.scenario = setup.name;
    summary.seed = setup.master_seed;
    summary.coins = engine.coin_stats();
    summary.attacks = engine.attack_outcomes();
    summary.redirect_detections = engine.redirect_detections();
    summary.wall_clock_s = std::chrono::duration<double>(t1 - t0).count();

    fs::create_directories(out_dir);
    for (const auto& coin : summary.coins) {
        std::string path = out_dir + "/" + setup.name + "_" + coin.label + "_metrics.csv";
        std::ofstream csv(path);
        csv << "time_s,hash_rate,difficulty,height,fork_rate_window,price,profitability_mean\n";
        for (const auto& row : coin.series) {
            csv << csv_num(row.time_s) << ',' << csv_num(row.hash_rate) << ','
                << csv_num(row.difficulty) << ',' << row.height << ','
                << csv_num(row.fork_rate_window) << ',' << csv_num(row.price) << ','
                << csv_num(row.profitability_mean) << '\n';
        }
        summary.output_files.push_back(path);
    }
    {
        std::string path = out_dir + "/" + setup.name + "_chain.txt";
        std::ofstream chain(path);
        for (const auto& coin : summary.coins)
            engine.observer_tree(coin.label).export_records(chain);
        summary.output_files.push_back(path);
    }
    {
        std::string path = out_dir + "/" + setup.name + "_summary.json";
        std::ofstream js(path);
        js << summary_to_json(summary) << '\n';
        summary.output_files.push_back(path);
    }
    return summary;
}

std::string summary_to_json(const RunSummary& s) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["scenario"] = s.scenario;
    j["seed"] = s.seed;
    j["wall_clock_s"] = s.wall_clock_s;
    j["redirect_detections"] = s.redirect_detections;
    j["coins"] = nlohmann::json::array();
    for (const auto& c : s.coins) {
        nlohmann::json jc;
        jc["label"] = c.label;
        jc["final_height"] = c.final_height;
        jc["minted_supply"] = to_coins(c.minted_supply);
        jc["schedule_supply"] = to_coins(c.schedule_supply);
        jc["fork_rate"] = c.forks.fork_rate;
        jc["stale_blocks"] = c.forks.stale_blocks;
        jc["total_blocks"] = c.forks.total_blocks;
        jc["low_confidence"] = c.forks.low_confidence;
        nlohmann::json hist = nlohmann::json::object();
        for (const auto& [depth, count] : c.forks.depth_histogram)
            hist[std::to_string(depth)] = count;
        jc["abandoned_depth_histogram"] = hist;
        j["coins"].push_back(jc);
    }
    j["attacks"] = nlohmann::json::array();
    for (const auto& a : s.attacks) {
        nlohmann::json ja;
        ja["success"] = a.success;
        ja["aborted_budget"] = a.aborted_budget;
        ja["aborted_deadline"] = a.aborted_deadline;
        ja["detected"] = a.detected;
        ja["blocks_mined_secret"] = a.blocks_mined_secret;
        ja["elapsed"] = a.elapsed;
        ja["spent"] = a.spent;
        ja["revenue"] = a.revenue;
        ja["net"] = a.net;
        ja["ship_time"] = a.ship_time;
        ja["publish_time"] = a.publish_time;
        j["attacks"].push_back(ja);
    }
    j["output_files"] = s.output_files;
    return j.dump(2);
}

SweepResult run_sweep(const ScenarioDoc& doc, const std::string& parameter,
                      const std::vector<std::string>& values, const std::string& out_dir,
                      int jobs) {
    SweepResult result;
    result.parameter = parameter;
    result.values = values;
    result.runs.resize(values.size());
    if (values.empty())
        return result;

    // Validate the parameter path once up front.
    {
        ScenarioDoc probe = doc;
        apply_override(probe, parameter, values.front());
    }

#ifdef _OPENMP
    if (jobs > 0)
        omp_set_num_threads(jobs);
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::size_t i = 0; i < values.size(); ++i) {
        ScenarioDoc local = doc;
        apply_override(local, parameter, values[i]);
        std::vector<std::string> errors;
        SimSetup setup = build_setup(local, errors);
        if (!errors.empty())
            throw ParseError("sweep value " + values[i] + ": invalid scenario");
        setup.master_seed += i;
        setup.name += "_" + std::to_string(i);
        result.runs[i] = run_scenario(setup, out_dir + "/run" + std::to_string(i));
    }
    return result;
}

void write_sweep_aggregate(const SweepResult& sweep, const std::string& path) {
    std::ofstream csv(path);
    csv << "param,value,seed,coin,final_height,minted_supply,fork_rate,attack_successes,attack_runs\n";
    for (std::size_t i = 0; i < sweep.runs.size(); ++i) {
        const RunSummary& r = sweep.runs[i];
        std::int64_t succ = 0;
        for (const auto& a : r.attacks)
            succ += a.success ? 1 : 0;
        for (const auto& c : r.coins) {
            csv << sweep.parameter << ',' << sweep.values[i] << ',' << r.seed << ',' << c.label
                << ',' << c.final_height << ',' << csv_num(to_coins(c.minted_supply)) << ','
                << csv_num(c.forks.fork_rate) << ',' << succ << ',' << r.attacks.size() << '\n';
        }
    }
}

std::vector<PairedDefenseStats> evaluate_defense(const SimSetup& base,
                                                 const std::vector<DefenseVariant>& variants,
                                                 int seeds, int jobs) {
    std::vector<PairedDefenseStats> stats(variants.size());
    for (std::size_t v = 0; v < variants.size(); ++v) {
        stats[v].variant = variants[v];
        stats[v].per_seed_success.assign(static_cast<std::size_t>(seeds), 0);
        stats[v].runs = seeds;
    }
    std::vector<double> accept_sum(variants.size(), 0.0);
    std::vector<std::int64_t> accept_n(variants.size(), 0);
    std::vector<std::int64_t> detections(variants.size(), 0);

#ifdef _OPENMP
    if (jobs > 0)
        omp_set_num_threads(jobs);
#pragma omp parallel for collapse(2) schedule(dynamic)
#endif
    for (int s = 0; s < seeds; ++s) {
        for (std::size_t v = 0; v < variants.size(); ++v) {
            SimSetup setup = base;
            setup.master_seed = base.master_seed + static_cast<std::uint64_t>(s);
            setup.variant = variants[v];
            setup.stop_after_attacks = true;
            Engine engine(setup);
            engine.run();
            bool success = false;
            double accept = -1.0;
            for (const auto& out : engine.attack_outcomes()) {
                success = success || out.success;
                if (out.ship_time >= 0)
                    accept = out.ship_time;
            }
            if (success)
                stats[v].per_seed_success[static_cast<std::size_t>(s)] = 1;
#ifdef _OPENMP
#pragma omp critical
#endif
            {
                if (accept >= 0) {
                    accept_sum[v] += accept;
                    ++accept_n[v];
                }
                detections[v] += engine.redirect_detections();
            }
        }
    }
    for (std::size_t v = 0; v < variants.size(); ++v) {
        for (char c : stats[v].per_seed_success)
            stats[v].successes += c;
        stats[v].detections = detections[v];
        stats[v].mean_time_to_acceptance =
            accept_n[v] > 0 ? accept_sum[v] / static_cast<double>(accept_n[v]) : -1.0;
    }
    return stats;
}

} // namespace chainlab
