// Times the serial reference Monte Carlo loop against the OpenMP batch on the
// same seeds and checks they agree run for run.

#include <chrono>
#include <cstdlib>
#include <iostream>

#include "chainlab/batch.hpp"

using namespace chainlab;
using Clock = std::chrono::steady_clock;

namespace {

SimSetup attack_setup() {
    SimSetup s;
    s.name = "bench";
    s.master_seed = 7000;
    s.duration = 4.0e6;
    CoinSetup c;
    c.spec = coin_preset("BTC");
    c.spec.retarget_interval = 100000; // no retarget inside the window
    s.coins.push_back(c);
    s.miners.push_back({"honest", 5e12, "BTC", 0.0, false, false, 2});
    s.peers.push_back({"obs", false, 1});
    AttackSetup atk;
    atk.coin = "BTC";
    atk.attacker_hash = 1e13 * 0.3 / 0.7;
    atk.z_wait = 2;
    atk.trigger = 1200;
    atk.deadline = 3.0e6;
    atk.value = coins(100.0);
    s.attacks.push_back(atk);
    s.latency = LatencyModel::fixed(0.5);
    s.metrics_interval = 0;
    s.stop_after_attacks = true;
    return s;
}

} // namespace

int main(int argc, char** argv) {
    int runs = argc > 1 ? std::atoi(argv[1]) : 200;
    int jobs = argc > 2 ? std::atoi(argv[2]) : 0;
    SimSetup base = attack_setup();

    auto t0 = Clock::now();
    BatchResult serial = run_batch_serial(base, runs);
    auto t1 = Clock::now();
    BatchResult parallel = run_batch_parallel(base, runs, jobs);
    auto t2 = Clock::now();

    double ts = std::chrono::duration<double>(t1 - t0).count();
    double tp = std::chrono::duration<double>(t2 - t1).count();
    std::cout << "runs: " << runs << "\n";
    std::cout << "serial:   " << ts << " s  (" << runs / ts << " runs/s)\n";
    std::cout << "parallel: " << tp << " s  (" << runs / tp << " runs/s)\n";
    std::cout << "speedup:  " << ts / tp << "x\n";
    std::cout << "success rate: " << serial.success_rate() << "\n";
    if (!(serial == parallel)) {
        std::cout << "MISMATCH: parallel batch differs from serial reference\n";
        return 1;
    }
    std::cout << "parallel batch matches serial reference\n";
    return 0;
}
