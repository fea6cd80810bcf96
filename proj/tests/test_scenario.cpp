#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "chainlab/runner.hpp"
#include "chainlab/scenario.hpp"

using namespace chainlab;

namespace {

const char* kScenario = R"(# demo scenario
name = demo
master_seed = 42
duration = 30000
metrics_interval = 600

[coin]
preset = UNO

[coin]
label = ALT
hash_family = sha256
block_time = 600
retarget_interval = 2016
reward_schedule = 0:25,100:12.5

[network]
latency = lognormal
median = 6.5
mean = 12.6

[miner]
name = m
count = 2
hash_rate = 1e12
coin = ALT

[peer]
name = obs
confirmer = true

[attack]
type = double_spend
coin = ALT
attacker_hash = 5e12
z_wait = 2
trigger = 1200
value = 10

[defense]
variant = timestamped_20s
threshold = 20
)";

} // namespace

TEST_SUITE("scenario") {

TEST_CASE("parsing a full scenario") {
    ScenarioDoc doc = parse_scenario_text(kScenario);
    std::vector<std::string> errors;
    SimSetup setup = build_setup(doc, errors);
    CHECK(errors.empty());
    CHECK(setup.name == "demo");
    CHECK(setup.master_seed == 42);
    REQUIRE(setup.coins.size() == 2);
    CHECK(setup.coins[0].spec.label == "UNO");
    CHECK(setup.coins[1].spec.reward_schedule.size() == 2);
    CHECK(setup.latency.family == LatencyFamily::Lognormal);
    REQUIRE(setup.miners.size() == 1);
    CHECK(setup.miners[0].count == 2);
    CHECK(setup.variant == DefenseVariant::Timestamped20s);
    REQUIRE(setup.attacks.size() == 1);
    CHECK(setup.attacks[0].z_wait == 2);
}

TEST_CASE("the UNO preset reproduces the published schedule through the parser") {
    ScenarioDoc doc = parse_scenario_text("name = x\nmaster_seed = 1\nduration = 10\n[coin]\npreset = UNO\n");
    std::vector<std::string> errors;
    SimSetup setup = build_setup(doc, errors);
    REQUIRE(errors.empty());
    const CoinSpec& uno = setup.coins[0].spec;
    REQUIRE(uno.reward_schedule.size() == 7);
    CHECK(uno.reward_schedule[0].reward == coins(1.0));
    CHECK(uno.reward_schedule[6].from_height == 612'000);
    CHECK(uno.reward_schedule[6].reward == coins(0.0001));
    CHECK(uno.block_time_target == doctest::Approx(74.4));
    CHECK(*uno.max_supply == coins(250'000.0));
}

TEST_CASE("missing master_seed is reported by name, along with other errors") {
    ScenarioDoc doc = parse_scenario_text("name = x\nduration = 10\n[coin]\npreset = BTC\n");
    std::vector<std::string> errors;
    build_setup(doc, errors);
    REQUIRE(!errors.empty());
    bool found = false;
    for (const auto& e : errors)
        found = found || e.find("master_seed") != std::string::npos;
    CHECK(found);
}

TEST_CASE("dangling references are collected, not fatal one at a time") {
    const char* text = R"(
name = x
master_seed = 1
duration = 10
[coin]
preset = BTC
[miner]
name = m
hash_rate = 1
coin = NOPE
[attack]
type = hidden_fork
coin = ALSO_NOPE
pool = ghost
)";
    ScenarioDoc doc = parse_scenario_text(text);
    std::vector<std::string> errors;
    build_setup(doc, errors);
    CHECK(errors.size() >= 3); // bad miner coin, bad attack coin, unknown pool
}

TEST_CASE("unknown preset yields a validation error") {
    ScenarioDoc doc =
        parse_scenario_text("name = x\nmaster_seed = 1\nduration = 10\n[coin]\npreset = WAT\n");
    std::vector<std::string> errors;
    build_setup(doc, errors);
    REQUIRE(!errors.empty());
    CHECK(errors[0].find("preset") != std::string::npos);
}

TEST_CASE("serialize/parse round trip is stable") {
    ScenarioDoc doc = parse_scenario_text(kScenario);
    std::vector<std::string> e1;
    SimSetup setup = build_setup(doc, e1);
    REQUIRE(e1.empty());

    ScenarioDoc canon = scenario_doc_from_setup(setup);
    std::string text1 = serialize_scenario(canon);
    ScenarioDoc reparsed = parse_scenario_text(text1);
    std::vector<std::string> e2;
    SimSetup setup2 = build_setup(reparsed, e2);
    REQUIRE(e2.empty());
    std::string text2 = serialize_scenario(scenario_doc_from_setup(setup2));
    CHECK(text1 == text2);
}

TEST_CASE("overrides rewrite globals and section keys") {
    ScenarioDoc doc = parse_scenario_text(kScenario);
    apply_override(doc, "master_seed", "7");
    apply_override(doc, "network.median", "5.0");
    apply_override(doc, "coin.ALT.block_time", "300");
    apply_override(doc, "attack.z_wait", "4");
    std::vector<std::string> errors;
    SimSetup setup = build_setup(doc, errors);
    REQUIRE(errors.empty());
    CHECK(setup.master_seed == 7);
    CHECK(setup.latency.median == 5.0);
    CHECK(setup.coins[1].spec.block_time_target == 300.0);
    CHECK(setup.attacks[0].z_wait == 4);
    CHECK_THROWS_AS(apply_override(doc, "nothing.here.at_all", "1"), DanglingReferenceError);
}

TEST_CASE("run_scenario writes the declared outputs and reruns byte-identically") {
    namespace fs = std::filesystem;
    ScenarioDoc doc = parse_scenario_text(kScenario);
    apply_override(doc, "duration", "20000");
    apply_override(doc, "name", "rt");
    std::vector<std::string> errors;
    SimSetup setup = build_setup(doc, errors);
    REQUIRE(errors.empty());

    fs::path dir1 = fs::temp_directory_path() / "chainlab_rt1";
    fs::path dir2 = fs::temp_directory_path() / "chainlab_rt2";
    fs::remove_all(dir1);
    fs::remove_all(dir2);
    RunSummary s1 = run_scenario(setup, dir1.string());
    RunSummary s2 = run_scenario(setup, dir2.string());

    REQUIRE(!s1.output_files.empty());
    for (const auto& f : s1.output_files) {
        CHECK(fs::exists(f));
        CHECK(fs::file_size(f) > 0);
    }
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    };
    CHECK(slurp(dir1 / "rt_ALT_metrics.csv") == slurp(dir2 / "rt_ALT_metrics.csv"));
    CHECK(slurp(dir1 / "rt_UNO_metrics.csv") == slurp(dir2 / "rt_UNO_metrics.csv"));
    CHECK(slurp(dir1 / "rt_chain.txt") == slurp(dir2 / "rt_chain.txt"));
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("sweep: one run per value, aggregate written; empty list runs nothing") {
    namespace fs = std::filesystem;
    ScenarioDoc doc = parse_scenario_text(kScenario);
    apply_override(doc, "duration", "8000");
    fs::path dir = fs::temp_directory_path() / "chainlab_sweep";
    fs::remove_all(dir);
    auto sweep = run_sweep(doc, "attack.z_wait", {"1", "2"}, dir.string(), 1);
    CHECK(sweep.runs.size() == 2);
    CHECK(sweep.runs[0].seed + 1 == sweep.runs[1].seed);
    write_sweep_aggregate(sweep, (dir / "agg.csv").string());
    CHECK(fs::exists(dir / "agg.csv"));

    auto empty = run_sweep(doc, "attack.z_wait", {}, dir.string(), 1);
    CHECK(empty.runs.empty());
    fs::remove_all(dir);
}

} // TEST_SUITE
