#include <doctest.h>

#include <cmath>

#include "chainlab/mining.hpp"

using namespace chainlab;

namespace {
Difficulty test_diff(double hashes, double target_time = 600.0, std::int64_t interval = 2016) {
    Difficulty d;
    d.coin = "T";
    d.expected_hashes_per_block = hashes;
    d.target_block_time = target_time;
    d.retarget_interval_blocks = interval;
    return d;
}
} // namespace

TEST_SUITE("mining") {

TEST_CASE("retarget scaling and clamping") {
    Difficulty d = test_diff(1e12, 600.0, 100);
    double expected_span = 600.0 * 100;

    // On schedule: unchanged.
    CHECK(retarget(d, expected_span).expected_hashes_per_block == doctest::Approx(1e12));
    // Twice too fast: difficulty doubles.
    CHECK(retarget(d, expected_span / 2).expected_hashes_per_block == doctest::Approx(2e12));
    // Ten times too fast: clamped at 4x.
    CHECK(retarget(d, expected_span / 10).expected_hashes_per_block == doctest::Approx(4e12));
    // Ten times too slow: clamped at 1/4.
    CHECK(retarget(d, expected_span * 10).expected_hashes_per_block == doctest::Approx(0.25e12));
}

TEST_CASE("mine step delay averages difficulty over hash rate") {
    Difficulty d = test_diff(600.0 * 1e9); // 600 s at 1e9 H/s
    RngStream rng(5, "mine");
    double sum = 0;
    const int n = 10'000;
    for (int i = 0; i < n; ++i)
        sum += mine_step_delay(1e9, d, rng);
    CHECK(sum / n == doctest::Approx(600.0).epsilon(0.02));
    CHECK_THROWS_AS(mine_step_delay(0.0, d, rng), NonPositiveRateError);
}

TEST_CASE("two equal miners split the blocks evenly") {
    Difficulty d = test_diff(600.0 * 1e9);
    RngStream a(6, "miner-a"), b(6, "miner-b");
    int wins_a = 0;
    const int n = 10'000;
    for (int i = 0; i < n; ++i)
        wins_a += mine_step_delay(1e9, d, a) < mine_step_delay(1e9, d, b) ? 1 : 0;
    // Binomial(n, 1/2): 3 sigma is ~150.
    CHECK(std::abs(wins_a - n / 2) < 3.0 * std::sqrt(n * 0.25));
}

TEST_CASE("work items disclose the template only under the stratum protocol") {
    PoolActor honest;
    honest.work_protocol = WorkProtocol::StratumLike;
    BlockTemplate tmpl;
    tmpl.parent = sha256("tip");
    tmpl.coin = "T";
    RngStream rng(7, "pool");
    WorkItem item = issue_work(honest, tmpl, 66.0, rng);
    REQUIRE(item.prev_id_disclosed.has_value());
    CHECK(*item.prev_id_disclosed == tmpl.parent);
    CHECK(*item.coin_disclosed == "T");

    PoolActor hidden;
    hidden.work_protocol = WorkProtocol::H0Only;
    BlockTemplate secret;
    secret.parent = sha256("secret-tip");
    secret.coin = "T";
    RngStream rng_a(8, "pool"), rng_b(8, "pool");
    WorkItem honest_view = issue_work(hidden, tmpl, 66.0, rng_a);
    WorkItem subverted_view = issue_work(hidden, secret, 66.0, rng_b);
    // The miner-observable fields are identical whatever the template.
    CHECK(honest_view.h0 == subverted_view.h0);
    CHECK(!honest_view.prev_id_disclosed.has_value());
    CHECK(!subverted_view.prev_id_disclosed.has_value());
    CHECK(honest_view.target_zeros == subverted_view.target_zeros);
}

TEST_CASE("redirect detection") {
    Hash256 tip = sha256("tip");
    WorkItem stratum;
    stratum.prev_id_disclosed = tip;
    CHECK(detect_redirect(stratum, tip) == RedirectCheck::Consistent);

    WorkItem recent_ok;
    recent_ok.prev_id_disclosed = sha256("tip-1");
    CHECK(detect_redirect(recent_ok, tip, {sha256("tip-1")}) == RedirectCheck::Consistent);

    WorkItem foreign;
    foreign.prev_id_disclosed = sha256("who-knows");
    CHECK(detect_redirect(foreign, tip) == RedirectCheck::Redirected);

    WorkItem h0only;
    CHECK(detect_redirect(h0only, tip) == RedirectCheck::Undetectable);
}

TEST_CASE("share rates follow hash_rate * window / 2^zeros") {
    // Network at 66-zero difficulty solving one block per 600 s: 42-zero
    // shares come out to 2^24 per block interval, 48-zero shares to 2^18.
    double network_hash = std::pow(2.0, 66.0) / 600.0;
    CHECK(expected_share_count(network_hash, 600.0, 42) == doctest::Approx(std::pow(2.0, 24.0)));
    CHECK(expected_share_count(network_hash, 600.0, 48) == doctest::Approx(std::pow(2.0, 18.0)));
}

TEST_CASE("generated shares are Poisson with geometric excess zeros") {
    Difficulty d = test_diff(std::pow(2.0, 30.0));
    RngStream rng(9, "shares");
    double rate = std::pow(2.0, 20.0) / 60.0; // mean 2^20/2^18 = 4 per 60 s at 18 zeros
    double total = 0;
    std::int64_t excess = 0, count = 0;
    const int windows = 4000;
    for (int w = 0; w < windows; ++w) {
        auto shares = generate_shares(1, rate, w * 60.0, 60.0, d, 18, rng);
        total += static_cast<double>(shares.size());
        for (const auto& s : shares) {
            CHECK(s.zeros >= 18);
            CHECK(s.found_at >= w * 60.0);
            CHECK(s.found_at <= (w + 1) * 60.0);
            excess += s.zeros - 18;
            ++count;
        }
    }
    double mean = total / windows;
    CHECK(mean == doctest::Approx(4.0).epsilon(0.05));
    // Geometric(1/2) excess: mean 1.
    CHECK(static_cast<double>(excess) / static_cast<double>(count) ==
          doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("share threshold equal to the difficulty makes shares exactly blocks") {
    Difficulty d = test_diff(std::pow(2.0, 20.0));
    RngStream rng(10, "shares");
    double hash = std::pow(2.0, 20.0) / 600.0; // one block per 600 s
    double total = 0;
    const int windows = 2000;
    for (int w = 0; w < windows; ++w)
        total += static_cast<double>(generate_shares(1, hash, w * 600.0, 600.0, d, 20, rng).size());
    CHECK(total / windows == doctest::Approx(1.0).epsilon(0.1));

    CHECK_THROWS_AS(generate_shares(1, hash, 0.0, 600.0, d, 24, rng),
                    ThresholdAboveDifficultyError);
}

TEST_CASE("aux pow: parent work meeting child difficulty yields a child block") {
    CoinSpec child;
    child.label = "child";
    child.hash_family = "scrypt";
    child.reward_schedule = {{0, coins(10.0)}};
    child.merged_mining_parent = "parent";
    Difficulty cd = test_diff(1e10);

    Block parent;
    parent.coin = "parent";
    parent.miner = 3;
    parent.timestamp = 1234.0;
    parent.work = 1e12; // stronger than the child needs
    parent.id = sha256("parent-block");

    auto blk = apply_aux_pow(parent, child, cd, 5, sha256("child-tip"), coins(10.0));
    REQUIRE(blk.has_value());
    CHECK(blk->coin == "child");
    CHECK(blk->height == 5);
    CHECK(blk->miner == 3);
    CHECK(blk->timestamp == 1234.0);
    CHECK(blk->merkle == parent.id); // carries the parent proof

    parent.work = 1e9; // too weak
    CHECK(!apply_aux_pow(parent, child, cd, 5, sha256("child-tip"), coins(10.0)).has_value());

    CoinSpec standalone = child;
    standalone.merged_mining_parent.reset();
    parent.work = 1e12;
    CHECK(!apply_aux_pow(parent, standalone, cd, 5, sha256("child-tip"), coins(10.0)).has_value());
}

} // TEST_SUITE
