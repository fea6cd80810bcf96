#include <doctest.h>

#include <cmath>

#include "chainlab/attacks.hpp"
#include "mc_oracle.hpp"

using namespace chainlab;

TEST_SUITE("attacks") {

TEST_CASE("catch-up probability boundary cases") {
    CHECK(catch_up_probability(0.5, 6) == 1.0);
    CHECK(catch_up_probability(0.8, 3) == 1.0);
    CHECK(catch_up_probability(0.0, 1) == 0.0);
    CHECK(catch_up_probability(0.0, 6) == 0.0);
    CHECK(catch_up_probability(0.0, 0) == 1.0);
    CHECK(catch_up_probability(0.1, 0) == 1.0);
    CHECK_THROWS_AS(catch_up_probability(-0.1, 1), SimError);
    CHECK_THROWS_AS(catch_up_probability(1.1, 1), SimError);
    CHECK_THROWS_AS(catch_up_probability(0.1, -1), SimError);
}

TEST_CASE("catch-up probability matches frozen closed-form values") {
    // Verified against an independent evaluation of the same sum.
    CHECK(catch_up_probability(0.1, 6) == doctest::Approx(2.428027454e-4).epsilon(1e-9));
    CHECK(catch_up_probability(0.1, 1) == doctest::Approx(0.2045872739).epsilon(1e-9));
    CHECK(catch_up_probability(0.3, 5) == doctest::Approx(0.1773523114).epsilon(1e-9));
    CHECK(catch_up_probability(0.45, 6) == doctest::Approx(0.7661054589).epsilon(1e-9));
}

TEST_CASE("catch-up probability decreases in z and increases in q") {
    for (double q : {0.05, 0.1, 0.2, 0.3, 0.45}) {
        double prev = 1.1;
        for (std::int64_t z = 0; z <= 8; ++z) {
            double v = catch_up_probability(q, z);
            CHECK(v <= prev + 1e-15);
            prev = v;
        }
    }
    for (std::int64_t z : {1, 3, 6}) {
        double prev = -0.1;
        for (double q : {0.0, 0.1, 0.2, 0.3, 0.4, 0.49}) {
            double v = catch_up_probability(q, z);
            CHECK(v >= prev - 1e-15);
            prev = v;
        }
    }
}

TEST_CASE("closed form agrees with the random-walk Monte Carlo") {
    RngStream rng(59, "mc-walk");
    // Unit-scale check; the acceptance suite runs the full 1e7-trial version.
    double mc = chainlab_test::mc_catch_up_probability(0.3, 4, 400'000, rng);
    double cf = catch_up_probability(0.3, 4);
    double sigma = std::sqrt(cf * (1 - cf) / 400'000.0);
    CHECK(std::abs(mc - cf) < 4 * sigma);
}

TEST_CASE("double spend plans pair two spends of the same output") {
    auto plan = make_double_spend_plan("T", coins(50.0), 1, 2, 100.0, 6, 1e12);
    REQUIRE(plan.victim_tx.inputs.size() == 1);
    REQUIRE(plan.replacement_tx.inputs.size() == 1);
    CHECK(plan.victim_tx.inputs[0].source == plan.replacement_tx.inputs[0].source);
    CHECK(!(plan.victim_tx.tx_id == plan.replacement_tx.tx_id));
    auto sets = detect_conflicts({plan.victim_tx, plan.replacement_tx});
    REQUIRE(sets.size() == 1);
    CHECK(sets[0].size() == 2);
}

TEST_CASE("bribe adoption follows the accepting hash share") {
    std::vector<MinerActor> miners(10);
    for (int i = 0; i < 10; ++i) {
        miners[static_cast<std::size_t>(i)].hash_rate = 1.0;
        miners[static_cast<std::size_t>(i)].coin_assignment = "T";
        miners[static_cast<std::size_t>(i)].accept_bribes = i < 3;
    }
    CHECK(bribe_inclusion(miners, "T", 1.0, 0.0, 0) == doctest::Approx(0.3));
    for (auto& m : miners)
        m.accept_bribes = true;
    CHECK(bribe_inclusion(miners, "T", 1.0, 0.0, 0) == doctest::Approx(1.0));
    for (auto& m : miners)
        m.accept_bribes = false;
    CHECK(bribe_inclusion(miners, "T", 1.0, 0.0, 0) == 0.0);
    // A bribe below the fee differential convinces nobody.
    for (auto& m : miners)
        m.accept_bribes = true;
    CHECK(bribe_inclusion(miners, "T", 0.5, 1.0, 0) == 0.0);
    CHECK_THROWS_AS(bribe_inclusion(miners, "T", 1.0, 0.0, 2), AlreadyConfirmedError);
}

TEST_CASE("cartel filter accepts members only") {
    auto policy = cartel_filter({1, 2, 3});
    CHECK(policy.accepts(2));
    CHECK(!policy.accepts(9));
    auto open = cartel_filter({});
    CHECK(open.accepts(9)); // empty cartel means no effect
}

} // TEST_SUITE
