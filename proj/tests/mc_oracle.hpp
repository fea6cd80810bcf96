#pragma once

// Test-side oracles, independent of the library's analytic implementations.

#include <cstdint>

#include "chainlab/rng.hpp"

namespace chainlab_test {

// Direct Monte Carlo of the catch-up model: the attacker's progress during
// the victim's z-block wait is drawn Poisson(z*q/(1-q)); from the remaining
// deficit a +1/-1 random walk (up with probability q) either erases the
// deficit or drifts away past a bail-out bound.
inline double mc_catch_up_probability(double q, std::int64_t z, std::int64_t trials,
                                      chainlab::RngStream& rng) {
    if (q <= 0.0)
        return z == 0 ? 1.0 : 0.0;
    double p = 1.0 - q;
    double lambda = static_cast<double>(z) * q / p;
    std::int64_t wins = 0;
    const std::int64_t bound = 200; // (q/p)^200 is far below resolution
    for (std::int64_t t = 0; t < trials; ++t) {
        std::int64_t k = static_cast<std::int64_t>(rng.poisson(lambda));
        std::int64_t deficit = z - k;
        if (deficit <= 0) {
            ++wins;
            continue;
        }
        while (deficit > 0 && deficit < bound)
            deficit += rng.bernoulli(q) ? -1 : 1;
        if (deficit <= 0)
            ++wins;
    }
    return static_cast<double>(wins) / static_cast<double>(trials);
}

} // namespace chainlab_test
