#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chainlab/chain.hpp"
#include "chainlab/econ.hpp"
#include "chainlab/errors.hpp"

namespace chainlab {

// Satoshi's catch-up probability: the attacker's concurrent progress during
// the victim's z-block wait is Poisson with mean z*q/(1-q); from a deficit of
// d the chance of ever closing it is (q/(1-q))^d. Returns 1 for q >= 1/2.
double catch_up_probability(double q, std::int64_t z);

struct DoubleSpendPlan {
    std::string coin;
    Transaction victim_tx;       // attacker -> victim
    Transaction replacement_tx;  // attacker -> attacker, same inputs
    std::int64_t z_wait = 6;
    double attack_hash = 0.0;    // rented + owned + redirected, hashes/second
    double rented_hash = 0.0;    // portion paid for at the rental rate
    double deadline = 0.0;       // seconds from attack start; 0 -> 20*z*T default
    double budget = 0.0;         // currency; 0 -> unlimited
    double value = 0.0;          // currency the victim ships against
    double premium = 0.0;
};

// Victim and replacement spend identical inputs: a conflict set of size two.
DoubleSpendPlan make_double_spend_plan(const std::string& coin, Amount amount,
                                       std::uint64_t attacker_key, std::uint64_t victim_key,
                                       double created_at, std::int64_t z_wait,
                                       double attack_hash);

struct AttackOutcome {
    bool success = false;
    bool aborted_budget = false;
    bool aborted_deadline = false;
    bool detected = false;             // any member flagged the work source
    std::int64_t blocks_mined_secret = 0;
    double elapsed = 0.0;
    double spent = 0.0;
    double revenue = 0.0;
    double net = 0.0;                  // always revenue - spent
    double ship_time = -1.0;
    double publish_time = -1.0;
};

// Each bribable miner switches to the conflicting transaction when the bribe
// beats the fee it would lose; returns the hash fraction adopting.
double bribe_inclusion(const std::vector<MinerActor>& miners, const std::string& coin,
                       double bribe, double fee_differential, std::int64_t original_confirmations);

// Block-acceptance policy: cartel members treat non-cartel blocks as invalid.
struct CartelPolicy {
    std::set<ActorId> members;
    bool accepts(ActorId block_miner) const {
        return members.empty() || members.count(block_miner) != 0;
    }
};

CartelPolicy cartel_filter(const std::set<ActorId>& cartel);

} // namespace chainlab
