#include "chainlab/batch.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chainlab {

BatchRunResult run_once(SimSetup setup) {
    Engine engine(std::move(setup));
    engine.run();
    BatchRunResult r;
    r.seed = engine.setup().master_seed;
    for (const auto& out : engine.attack_outcomes()) {
        r.attack_success = r.attack_success || out.success;
        r.attack_detected = r.attack_detected || out.detected;
        r.attack_elapsed = out.elapsed;
        r.attack_net = out.net;
        r.blocks_secret = out.blocks_mined_secret;
    }
    auto stats = engine.coin_stats();
    if (!stats.empty()) {
        r.final_height = stats.front().final_height;
        r.minted_supply = stats.front().minted_supply;
    }
    return r;
}

namespace {
SimSetup nth_setup(const SimSetup& base, int i) {
    SimSetup s = base;
    s.master_seed = base.master_seed + static_cast<std::uint64_t>(i);
    s.metrics_interval = 0; // repetitions keep no time series
    s.stop_after_attacks = !s.attacks.empty();
    return s;
}
} // namespace

BatchResult run_batch_serial(const SimSetup& base, int runs) {
    BatchResult out;
    out.runs.resize(static_cast<std::size_t>(runs));
    for (int i = 0; i < runs; ++i)
        out.runs[static_cast<std::size_t>(i)] = run_once(nth_setup(base, i));
    return out;
}

BatchResult run_batch_parallel(const SimSetup& base, int runs, int jobs) {
    BatchResult out;
    out.runs.resize(static_cast<std::size_t>(runs));
#ifdef _OPENMP
    if (jobs > 0)
        omp_set_num_threads(jobs);
#pragma omp parallel for schedule(dynamic)
#endif
    for (int i = 0; i < runs; ++i)
        out.runs[static_cast<std::size_t>(i)] = run_once(nth_setup(base, i));
    return out;
}

} // namespace chainlab
