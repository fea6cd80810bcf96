#include "chainlab/rng.hpp"

#include <cmath>

namespace chainlab {

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
} // namespace

RngStream::RngStream(std::uint64_t master_seed, std::string_view stream_id)
    : eng_(splitmix64(master_seed ^ fnv1a64(stream_id))), id_(stream_id) {}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
    if (n == 0)
        return 0;
    // Rejection sampling to kill modulo bias.
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = eng_();
    } while (x >= limit);
    return x % n;
}

double RngStream::exponential(double rate) {
    if (!(rate > 0.0))
        throw NonPositiveRateError("exponential: rate must be > 0, got " + std::to_string(rate));
    return -std::log(uniform01_open()) / rate;
}

double RngStream::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_normal_;
    }
    double u1 = uniform01_open();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    cached_normal_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

double RngStream::lognormal(double mu, double sigma) { return std::exp(mu + sigma * normal()); }

std::uint64_t RngStream::poisson(double mean) {
    if (mean < 0)
        throw NonPositiveRateError("poisson: mean must be >= 0");
    // Knuth's product method is exact but O(mean); large means are split into
    // chunks, which stays exact because Poisson is additive.
    std::uint64_t total = 0;
    double remaining = mean;
    constexpr double chunk = 30.0;
    while (remaining > 0) {
        double m = remaining > chunk ? chunk : remaining;
        remaining -= m;
        double limit = std::exp(-m);
        double prod = uniform01_open();
        std::uint64_t k = 0;
        while (prod > limit) {
            ++k;
            prod *= uniform01_open();
        }
        total += k;
    }
    return total;
}

double sample_exponential(RngStream& stream, double rate) { return stream.exponential(rate); }

} // namespace chainlab
