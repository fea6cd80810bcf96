#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chainlab/errors.hpp"
#include "chainlab/ids.hpp"
#include "chainlab/rng.hpp"

namespace chainlab {

struct RewardSegment {
    std::int64_t from_height = 0;
    Amount reward = 0;
};

struct CoinSpec {
    std::string label;
    std::string hash_family;            // coins sharing a family trade hash freely
    double block_time_target = 600.0;   // seconds
    std::int64_t retarget_interval = 2016;
    std::vector<RewardSegment> reward_schedule; // from_heights strictly increasing, first 0
    std::optional<Amount> max_supply;
    std::optional<std::string> merged_mining_parent;
    double initial_hashes_per_block = 0.0; // 0 -> derived by the scenario

    void validate() const;
};

// Reward for the block at `height`; clamped to the remaining supply when a
// max_supply is set, 0 once the cap is exhausted.
Amount reward_at(const CoinSpec& coin, std::int64_t height);

// Total coins minted for blocks 0..height inclusive (cap-aware).
Amount cumulative_reward(const CoinSpec& coin, std::int64_t height);

// reward_before / reward_after across schedule boundary `transition_index`
// (0-based; boundary i sits between segment i and segment i+1).
double schedule_drop_factor(const CoinSpec& coin, std::size_t transition_index);

// Built-in presets: BTC, UNO, DOGE, LTC.
CoinSpec coin_preset(const std::string& label);
std::vector<std::string> preset_names();

enum class PriceFamily { Fixed, ExogenousSeries, Elastic };

struct PriceModel {
    PriceFamily family = PriceFamily::Fixed;
    double fixed_price = 1.0;
    std::vector<std::pair<double, double>> series; // (time_s, price), sorted
    double elastic_base = 1.0;
    double elastic_demand = 0.0;

    double price_at(double t) const;
};

PriceModel load_price_series_csv(const std::string& path);

struct MinerActor {
    ActorId id = 0;
    std::string name;
    double hash_rate = 0.0;          // hashes/second
    double electricity_cost = 0.0;   // currency/second
    std::optional<ActorId> pool;
    std::string coin_assignment;     // empty -> switched off
    bool h0_only = false;            // protocol awareness
    bool accept_bribes = false;
    bool migratory = true;           // responds to the hash market
};

// Per-coin market view used by profitability and migration.
struct CoinMarketState {
    double total_hash_rate = 0.0;
    double price = 1.0;
    Amount next_reward = 0;
    double mean_fees_value = 0.0;    // currency per block
    double block_time_actual = 0.0;  // seconds; difficulty/hash when live
};

// Expected currency/second for `miner` if assigned to `coin` under `state`.
double profitability(const MinerActor& miner, const CoinMarketState& state);

struct MigrationDelta {
    ActorId miner = 0;
    std::string from;
    std::string to; // empty -> switched off
};

struct HashMarket {
    std::string family;
    double migration_responsiveness = 0.2; // movable fraction per tick
    double tick_interval = 600.0;
    double hysteresis = 0.01;              // relative profit edge needed to move
    double rental_hash = 0.0;              // hashes/second available to rent
    double rental_price = 0.0;             // currency per hash
};

// One market tick: up to responsiveness * movable hash reassigns toward the
// most profitable coin in the family; miners unprofitable everywhere switch
// off. Deterministic given the stream.
std::vector<MigrationDelta> migrate(const HashMarket& market, std::vector<MinerActor>& miners,
                                    const std::map<std::string, CoinMarketState>& coins,
                                    RngStream& rng);

// Geometric income series: first-period income decaying by `decay` per
// period. periods < 0 means unbounded.
double investor_return(double first_period_income, double decay, std::int64_t periods);

// Competitive-rental bound on the cost of mining `blocks_to_mine` blocks:
// block reward value times (1 + premium) per block.
double attack_cost_estimate(const CoinSpec& coin, std::int64_t next_height,
                            std::int64_t blocks_to_mine, double premium, double price,
                            const HashMarket& market, bool family_has_alternative);

} // namespace chainlab
