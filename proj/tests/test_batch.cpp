#include <doctest.h>

#include "chainlab/batch.hpp"

using namespace chainlab;

namespace {

SimSetup race_setup(double q, std::int64_t z) {
    SimSetup s;
    s.master_seed = 9000;
    s.duration = 5.0e6;
    CoinSetup c;
    c.spec.label = "T";
    c.spec.hash_family = "sha256";
    c.spec.block_time_target = 600.0;
    c.spec.retarget_interval = 1'000'000;
    c.spec.reward_schedule = {{0, coins(25.0)}};
    s.coins.push_back(c);
    double honest = 2e12;
    s.miners.push_back({"h1", honest / 2, "T", 0.0, false, false, 1});
    s.miners.push_back({"h2", honest / 2, "T", 0.0, false, false, 1});
    s.peers.push_back({"obs", false, 1});
    s.latency = LatencyModel::fixed(0.1);
    s.metrics_interval = 0;
    AttackSetup atk;
    atk.coin = "T";
    atk.attacker_hash = honest * q / (1.0 - q);
    atk.z_wait = z;
    atk.trigger = 600.0;
    atk.value = coins(50.0);
    atk.deadline = 4.0e6;
    s.attacks.push_back(atk);
    return s;
}

} // namespace

TEST_SUITE("batch") {

TEST_CASE("parallel batch reproduces the serial reference exactly") {
    SimSetup base = race_setup(0.3, 1);
    BatchResult serial = run_batch_serial(base, 60);
    BatchResult parallel = run_batch_parallel(base, 60, 2);
    CHECK(serial == parallel);
    BatchResult parallel1 = run_batch_parallel(base, 60, 1);
    CHECK(serial == parallel1);
}

TEST_CASE("per-run seeds differ and results vary across runs") {
    SimSetup base = race_setup(0.3, 1);
    BatchResult r = run_batch_serial(base, 40);
    REQUIRE(r.runs.size() == 40);
    CHECK(r.runs.front().seed + 39 == r.runs.back().seed);
    bool any_success = false, any_failure = false;
    for (const auto& run : r.runs) {
        any_success = any_success || run.attack_success;
        any_failure = any_failure || !run.attack_success;
    }
    CHECK(any_success);
    CHECK(any_failure);
}

TEST_CASE("overwhelming attacker wins nearly always") {
    SimSetup base = race_setup(10.0 / 11.0, 1); // ten times the honest hash
    BatchResult r = run_batch_serial(base, 100);
    CHECK(r.successes() >= 99);
}

} // TEST_SUITE
