#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "chainlab/event_queue.hpp"
#include "chainlab/rng.hpp"

using namespace chainlab;

TEST_SUITE("sim-core") {

TEST_CASE("schedule inserts and returns a handle") {
    EventQueue q;
    q.run_until(5.0);
    int fired = 0;
    auto h = q.schedule(10.0, EventKind::MarketTick, [&] { ++fired; });
    CHECK(q.size() == 1);
    CHECK(q.pending(h));

    SUBCASE("equal time is allowed") {
        q.schedule(5.0, EventKind::MarketTick, [&] { ++fired; });
        CHECK(q.size() == 2);
    }
    SUBCASE("scheduling in the past throws") {
        CHECK_THROWS_AS(q.schedule(4.9, EventKind::MarketTick, [] {}), PastEventError);
    }
}

TEST_CASE("run_until processes due events and advances the clock") {
    EventQueue q;
    CHECK(q.run_until(100.0) == 0);
    CHECK(q.now() == 100.0);

    std::vector<int> order;
    q.schedule(101.0, EventKind::MarketTick, [&] { order.push_back(1); });
    q.schedule(102.0, EventKind::MarketTick, [&] { order.push_back(2); });
    q.schedule(103.0, EventKind::MarketTick, [&] { order.push_back(3); });
    CHECK(q.run_until(102.5) == 2);
    CHECK(order == std::vector<int>{1, 2});
}

TEST_CASE("simultaneous events fire in insertion order") {
    EventQueue q;
    std::vector<int> order;
    q.schedule(1.0, EventKind::MarketTick, [&] { order.push_back(7); });
    q.schedule(1.0, EventKind::MarketTick, [&] { order.push_back(8); });
    q.run_until(2.0);
    CHECK(order == std::vector<int>{7, 8});
}

TEST_CASE("cancelled events never fire") {
    EventQueue q;
    int fired = 0;
    auto h = q.schedule(1.0, EventKind::MarketTick, [&] { ++fired; });
    q.schedule(2.0, EventKind::MarketTick, [&] { ++fired; });
    q.cancel(h);
    q.run_until(10.0);
    CHECK(fired == 1);
}

TEST_CASE("processed fire times are non-decreasing under random insertion") {
    EventQueue q;
    q.enable_log(true);
    RngStream rng(99, "insertion");
    std::function<void()> spawn = [&] {
        if (q.now() < 50.0)
            q.schedule(q.now() + rng.uniform(0.0, 3.0), EventKind::MsgArrival, spawn);
    };
    for (int i = 0; i < 20; ++i)
        q.schedule(rng.uniform(0.0, 10.0), EventKind::MsgArrival, spawn);
    q.run_until(100.0);
    double prev = 0.0;
    for (const auto& e : q.log()) {
        CHECK(e.fire_at >= prev);
        prev = e.fire_at;
    }
    CHECK(q.log().size() > 100);
}

TEST_CASE("identical seed and stream id reproduce draws; other streams differ") {
    RngStream a(42, "mining/alice"), b(42, "mining/alice"), c(42, "mining/bob");
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 1000; ++i) {
        auto x = a.next_u64();
        all_equal = all_equal && (x == b.next_u64());
        any_diff = any_diff || (x != c.next_u64());
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("exponential sampling: law of large numbers at rate 0.1") {
    RngStream rng(7, "exp");
    double sum = 0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i)
        sum += sample_exponential(rng, 0.1);
    CHECK(sum / n == doctest::Approx(10.0).epsilon(0.005));
}

TEST_CASE("exponential at one block per 600 s averages 600 s") {
    RngStream rng(8, "exp600");
    double sum = 0;
    const int n = 200'000;
    for (int i = 0; i < n; ++i)
        sum += sample_exponential(rng, 1.0 / 600.0);
    CHECK(sum / n == doctest::Approx(600.0).epsilon(0.01));
}

TEST_CASE("non-positive rate is rejected") {
    RngStream rng(1, "bad");
    CHECK_THROWS_AS(sample_exponential(rng, 0.0), NonPositiveRateError);
    CHECK_THROWS_AS(sample_exponential(rng, -1.0), NonPositiveRateError);
}

TEST_CASE("poisson sampling matches its mean and variance") {
    RngStream rng(11, "pois");
    for (double lambda : {0.5, 4.0, 37.0, 400.0}) {
        const int n = 20000;
        double sum = 0, sq = 0;
        for (int i = 0; i < n; ++i) {
            double k = static_cast<double>(rng.poisson(lambda));
            sum += k;
            sq += k * k;
        }
        double mean = sum / n;
        double var = sq / n - mean * mean;
        CHECK(std::abs(mean - lambda) < 4.0 * std::sqrt(lambda / n));
        CHECK(var == doctest::Approx(lambda).epsilon(0.1));
    }
}

TEST_CASE("lognormal sampling hits requested median and mean") {
    RngStream rng(13, "lognorm");
    double mu = std::log(6.5);
    double sigma = std::sqrt(2.0 * std::log(12.6 / 6.5));
    const int n = 100'000;
    std::vector<double> xs(n);
    double sum = 0;
    for (int i = 0; i < n; ++i) {
        xs[i] = rng.lognormal(mu, sigma);
        sum += xs[i];
    }
    std::nth_element(xs.begin(), xs.begin() + n / 2, xs.end());
    CHECK(xs[n / 2] == doctest::Approx(6.5).epsilon(0.015));
    CHECK(sum / n == doctest::Approx(12.6).epsilon(0.016));
}

} // TEST_SUITE
