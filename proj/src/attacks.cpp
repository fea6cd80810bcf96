#include "chainlab/attacks.hpp"

#include <cmath>

namespace chainlab {

double catch_up_probability(double q, std::int64_t z) {
    if (q < 0.0 || q > 1.0)
        throw SimError("catch_up_probability: q must be in [0, 1]");
    if (z < 0)
        throw SimError("catch_up_probability: z must be >= 0");
    if (q >= 0.5)
        return 1.0;
    if (q == 0.0)
        return z == 0 ? 1.0 : 0.0;
    double p = 1.0 - q;
    double lambda = static_cast<double>(z) * q / p;
    double ratio = q / p;
    double sum = 0.0;
    double pois = std::exp(-lambda); // Pois(0)
    for (std::int64_t k = 0; k <= z; ++k) {
        if (k > 0)
            pois *= lambda / static_cast<double>(k);
        sum += pois * (1.0 - std::pow(ratio, static_cast<double>(z - k)));
    }
    return 1.0 - sum;
}

DoubleSpendPlan make_double_spend_plan(const std::string& coin, Amount amount,
                                       std::uint64_t attacker_key, std::uint64_t victim_key,
                                       double created_at, std::int64_t z_wait,
                                       double attack_hash) {
    DoubleSpendPlan plan;
    plan.coin = coin;
    plan.z_wait = z_wait;
    plan.attack_hash = attack_hash;

    // Both spends consume the same funding output with the same signature;
    // only the recipient differs.
    OutputRef funding;
    HashWriter w;
    w.str("funding").u64(attacker_key).f64(created_at);
    funding.tx_id = w.digest();
    funding.index = 0;
    Signature sig;
    sig.r = U256::from_u64(attacker_key * 2 + 1);
    sig.s = U256::from_u64(attacker_key * 3 + 1);
    sig.key_id = attacker_key;

    plan.victim_tx = make_transaction({{funding, sig}}, {{victim_key, amount}}, 0, created_at);
    plan.replacement_tx =
        make_transaction({{funding, sig}}, {{attacker_key, amount}}, 0, created_at);
    return plan;
}

double bribe_inclusion(const std::vector<MinerActor>& miners, const std::string& coin,
                       double bribe, double fee_differential, std::int64_t original_confirmations) {
    if (original_confirmations > 0)
        throw AlreadyConfirmedError(
            "bribe_inclusion: bribery here only targets unconfirmed transactions");
    double total = 0.0, adopting = 0.0;
    for (const auto& m : miners) {
        if (m.coin_assignment != coin)
            continue;
        total += m.hash_rate;
        if (m.accept_bribes && bribe > fee_differential)
            adopting += m.hash_rate;
    }
    return total > 0 ? adopting / total : 0.0;
}

CartelPolicy cartel_filter(const std::set<ActorId>& cartel) { return CartelPolicy{cartel}; }

} // namespace chainlab
