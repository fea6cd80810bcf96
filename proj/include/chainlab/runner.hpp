#pragma once

#include <string>
#include <vector>

#include "chainlab/engine.hpp"
#include "chainlab/scenario.hpp"

namespace chainlab {

struct RunSummary {
    std::string scenario;
    std::uint64_t seed = 0;
    std::vector<CoinRunStats> coins;
    std::vector<AttackOutcome> attacks;
    std::int64_t redirect_detections = 0;
    std::vector<std::string> output_files;
    double wall_clock_s = 0.0;
};

// Executes the scenario and writes, under out_dir: one metrics CSV per coin,
// a chain record export, and a JSON summary. Returns the summary.
RunSummary run_scenario(const SimSetup& setup, const std::string& out_dir);

std::string summary_to_json(const RunSummary& s);

// Default output directory: $CHAINLAB_OUT or ./out.
std::string default_out_dir();

struct SweepResult {
    std::string parameter;
    std::vector<std::string> values;
    std::vector<RunSummary> runs;
};

// One run per value; run i gets seed master_seed + i. Runs execute in
// parallel up to `jobs`; outputs land in per-run directories.
SweepResult run_sweep(const ScenarioDoc& doc, const std::string& parameter,
                      const std::vector<std::string>& values, const std::string& out_dir,
                      int jobs);

void write_sweep_aggregate(const SweepResult& sweep, const std::string& path);

struct PairedDefenseStats {
    DefenseVariant variant = DefenseVariant::Baseline;
    std::int64_t successes = 0;
    std::int64_t runs = 0;
    std::int64_t detections = 0;
    double mean_time_to_acceptance = 0.0;
    std::vector<char> per_seed_success;
};

// Paired seeded comparison: for each seed the same scenario runs once per
// variant. The per-seed vectors line up across variants.
std::vector<PairedDefenseStats> evaluate_defense(const SimSetup& base,
                                                 const std::vector<DefenseVariant>& variants,
                                                 int seeds, int jobs);

} // namespace chainlab
