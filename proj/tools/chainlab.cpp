#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chainlab/runner.hpp"
#include "chainlab/scenario.hpp"

using namespace chainlab;

namespace {

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> out;
    std::istringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(item);
    return out;
}

int do_run(const std::string& file, const std::vector<std::string>& overrides,
           const std::string& out_dir) {
    ScenarioDoc doc = parse_scenario_file(file);
    for (const auto& ov : overrides) {
        auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ParseError("--override expects key=value, got: " + ov);
        apply_override(doc, ov.substr(0, eq), ov.substr(eq + 1));
    }
    std::vector<std::string> errors;
    SimSetup setup = build_setup(doc, errors);
    if (!errors.empty()) {
        std::cerr << file << ": invalid scenario:\n";
        for (const auto& e : errors)
            std::cerr << "  - " << e << "\n";
        return 2;
    }
    RunSummary summary = run_scenario(setup, out_dir);
    std::cout << summary_to_json(summary) << std::endl;
    return 0;
}

int do_validate(const std::string& file) {
    ScenarioDoc doc = parse_scenario_file(file);
    std::vector<std::string> errors;
    build_setup(doc, errors);
    if (errors.empty()) {
        std::cout << file << ": ok\n";
        return 0;
    }
    std::cerr << file << ": invalid scenario:\n";
    for (const auto& e : errors)
        std::cerr << "  - " << e << "\n";
    return 2;
}

int do_sweep(const std::string& file, const std::string& param, const std::string& values_csv,
             const std::vector<std::string>& overrides, const std::string& out_dir, int jobs) {
    ScenarioDoc doc = parse_scenario_file(file);
    for (const auto& ov : overrides) {
        auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ParseError("--override expects key=value, got: " + ov);
        apply_override(doc, ov.substr(0, eq), ov.substr(eq + 1));
    }
    auto values = split_csv(values_csv);
    SweepResult sweep = run_sweep(doc, param, values, out_dir, jobs);
    std::string agg = out_dir + "/sweep_aggregate.csv";
    write_sweep_aggregate(sweep, agg);
    std::cout << "sweep complete: " << sweep.runs.size() << " runs, aggregate at " << agg << "\n";
    return 0;
}

int do_presets() {
    for (const auto& name : preset_names()) {
        CoinSpec c = coin_preset(name);
        std::cout << c.label << "  family=" << c.hash_family
                  << "  block_time=" << c.block_time_target
                  << "s  retarget=" << c.retarget_interval << " blocks";
        if (c.max_supply)
            std::cout << "  cap=" << to_coins(*c.max_supply);
        std::cout << "\n  schedule:";
        for (const auto& seg : c.reward_schedule)
            std::cout << " " << seg.from_height << ":" << to_coins(seg.reward);
        std::cout << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"chainlab: proof-of-work consensus, attack and defense simulator"};
    app.require_subcommand(1);

    std::string out_dir = default_out_dir();
    std::vector<std::string> overrides;
    int jobs = 0;

    std::string run_file;
    auto* run_cmd = app.add_subcommand("run", "run a scenario file");
    run_cmd->add_option("file", run_file, "scenario file")->required();
    run_cmd->add_option("--out", out_dir, "output directory");
    run_cmd->add_option("--override", overrides, "key=value override (repeatable)");

    std::string sweep_file, sweep_param, sweep_values;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a scenario across parameter values");
    sweep_cmd->add_option("file", sweep_file, "scenario file")->required();
    sweep_cmd->add_option("--param", sweep_param, "parameter path, e.g. attack.z_wait")->required();
    sweep_cmd->add_option("--values", sweep_values, "comma-separated values")->required();
    sweep_cmd->add_option("--out", out_dir, "output directory");
    sweep_cmd->add_option("--jobs", jobs, "parallel runs");
    sweep_cmd->add_option("--override", overrides, "key=value override (repeatable)");

    std::string validate_file;
    auto* validate_cmd = app.add_subcommand("validate", "validate a scenario file");
    validate_cmd->add_option("file", validate_file, "scenario file")->required();

    app.add_subcommand("presets", "list built-in coin presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed())
            return do_run(run_file, overrides, out_dir);
        if (sweep_cmd->parsed())
            return do_sweep(sweep_file, sweep_param, sweep_values, overrides, out_dir, jobs);
        if (validate_cmd->parsed())
            return do_validate(validate_file);
        return do_presets();
    } catch (const ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const DanglingReferenceError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 3;
    }
}
