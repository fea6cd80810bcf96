#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chainlab/engine.hpp"

namespace chainlab {

// One Monte Carlo repetition of a scenario: run i executes with master seed
// base_seed + i. Runs share nothing, so the parallel path farms them out
// with OpenMP and merges results in index order; the serial path is the
// reference the parallel one must match bit for bit.
struct BatchRunResult {
    std::uint64_t seed = 0;
    bool attack_success = false;
    bool attack_detected = false;
    double attack_elapsed = 0.0;
    double attack_net = 0.0;
    std::int64_t blocks_secret = 0;
    std::int64_t final_height = 0;
    Amount minted_supply = 0;

    bool operator==(const BatchRunResult&) const = default;
};

struct BatchResult {
    std::vector<BatchRunResult> runs;

    std::int64_t successes() const {
        std::int64_t n = 0;
        for (const auto& r : runs)
            n += r.attack_success ? 1 : 0;
        return n;
    }
    double success_rate() const {
        return runs.empty() ? 0.0 : static_cast<double>(successes()) / static_cast<double>(runs.size());
    }

    bool operator==(const BatchResult&) const = default;
};

BatchRunResult run_once(SimSetup setup);

BatchResult run_batch_serial(const SimSetup& base, int runs);
BatchResult run_batch_parallel(const SimSetup& base, int runs, int jobs = 0);

} // namespace chainlab
