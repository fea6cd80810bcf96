#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "chainlab/errors.hpp"

namespace chainlab {

// Named, seeded random stream. The engine output of std::mt19937_64 is pinned
// by the standard, and every distribution here is hand-rolled on top of it, so
// a given (master_seed, stream_id) reproduces the same draws on any platform.
class RngStream {
public:
    RngStream() : RngStream(0, "default") {}
    RngStream(std::uint64_t master_seed, std::string_view stream_id);

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; safe as a log() argument.
    double uniform01_open() { return 1.0 - uniform01(); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    std::uint64_t uniform_below(std::uint64_t n);

    double exponential(double rate);

    // Standard normal via Box-Muller; second value cached.
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    double lognormal(double mu, double sigma);

    std::uint64_t poisson(double mean);

    bool bernoulli(double p) { return uniform01() < p; }

    const std::string& id() const { return id_; }

private:
    std::mt19937_64 eng_;
    std::string id_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

// Draw a mining / propagation delay: Exponential(rate) in seconds.
double sample_exponential(RngStream& stream, double rate);

std::uint64_t fnv1a64(std::string_view s);

} // namespace chainlab
