#include "chainlab/econ.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace chainlab {

void CoinSpec::validate() const {
    if (label.empty())
        throw SimError("CoinSpec: empty label");
    if (reward_schedule.empty())
        throw SimError("CoinSpec " + label + ": empty reward schedule");
    if (reward_schedule.front().from_height > 1)
        throw SimError("CoinSpec " + label + ": schedule must start at height 0 or 1");
    for (std::size_t i = 1; i < reward_schedule.size(); ++i)
        if (reward_schedule[i].from_height <= reward_schedule[i - 1].from_height)
            throw SimError("CoinSpec " + label + ": from_heights must increase strictly");
    if (!(block_time_target > 0))
        throw SimError("CoinSpec " + label + ": block_time_target must be > 0");
    if (retarget_interval < 1)
        throw SimError("CoinSpec " + label + ": retarget_interval must be >= 1");
}

namespace {

// Schedule value ignoring the supply cap.
Amount segment_reward(const CoinSpec& coin, std::int64_t height) {
    Amount r = 0;
    for (const auto& seg : coin.reward_schedule) {
        if (height >= seg.from_height)
            r = seg.reward;
        else
            break;
    }
    return r;
}

// Uncapped cumulative reward for blocks 0..height inclusive.
Amount uncapped_cumulative(const CoinSpec& coin, std::int64_t height) {
    Amount total = 0;
    const auto& sched = coin.reward_schedule;
    for (std::size_t i = 0; i < sched.size(); ++i) {
        std::int64_t seg_start = sched[i].from_height;
        if (seg_start > height)
            break;
        std::int64_t seg_end = (i + 1 < sched.size()) ? std::min(sched[i + 1].from_height - 1, height)
                                                      : height;
        std::int64_t first = std::max<std::int64_t>(seg_start, 0);
        if (i == 0)
            first = 0; // heights below the first from_height still mint segment 0
        if (seg_end >= first)
            total += sched[i].reward * (seg_end - first + 1);
    }
    return total;
}

} // namespace

Amount reward_at(const CoinSpec& coin, std::int64_t height) {
    if (height < 0)
        throw SimError("reward_at: negative height");
    Amount r = segment_reward(coin, height);
    if (coin.max_supply) {
        Amount before = height == 0 ? 0 : uncapped_cumulative(coin, height - 1);
        if (before >= *coin.max_supply)
            return 0;
        Amount remaining = *coin.max_supply - before;
        if (r > remaining)
            r = remaining;
    }
    return r;
}

Amount cumulative_reward(const CoinSpec& coin, std::int64_t height) {
    Amount total = uncapped_cumulative(coin, height);
    if (coin.max_supply && total > *coin.max_supply)
        total = *coin.max_supply;
    return total;
}

double schedule_drop_factor(const CoinSpec& coin, std::size_t transition_index) {
    if (transition_index + 1 >= coin.reward_schedule.size())
        throw SimError("schedule_drop_factor: no such transition in " + coin.label);
    Amount before = coin.reward_schedule[transition_index].reward;
    Amount after = coin.reward_schedule[transition_index + 1].reward;
    if (after == 0)
        throw SimError("schedule_drop_factor: reward drops to zero");
    return static_cast<double>(before) / static_cast<double>(after);
}

CoinSpec coin_preset(const std::string& label) {
    CoinSpec c;
    c.label = label;
    if (label == "BTC") {
        c.hash_family = "sha256";
        c.block_time_target = 600.0;
        c.retarget_interval = 2016;
        c.max_supply = coins(21'000'000.0);
        Amount r = coins(50.0);
        std::int64_t h = 0;
        while (r > 0) {
            c.reward_schedule.push_back({h, r});
            h += 210'000;
            r /= 2;
        }
    } else if (label == "UNO") {
        c.hash_family = "sha256";
        c.block_time_target = 74.4; // 1.24 minutes
        c.retarget_interval = 2016;
        c.max_supply = coins(250'000.0);
        c.reward_schedule = {
            {0, coins(1.0)},        {102'000, coins(0.5)},   {204'000, coins(0.25)},
            {300'000, coins(0.125)}, {408'000, coins(0.0625)}, {510'000, coins(0.03125)},
            {612'000, coins(0.0001)},
        };
    } else if (label == "DOGE") {
        c.hash_family = "scrypt";
        c.block_time_target = 60.0;
        c.retarget_interval = 240;
        // Halving segments span ~69 days at 60 s blocks; constant tail mints
        // ~5.2e9 coins per year.
        c.reward_schedule = {
            {0, coins(500'000.0)},  {100'000, coins(250'000.0)}, {200'000, coins(125'000.0)},
            {300'000, coins(62'500.0)}, {400'000, coins(31'250.0)}, {500'000, coins(15'625.0)},
            {600'000, coins(9'893.0)},
        };
    } else if (label == "LTC") {
        c.hash_family = "scrypt";
        c.block_time_target = 150.0;
        c.retarget_interval = 2016;
        c.max_supply = coins(84'000'000.0);
        Amount r = coins(50.0);
        std::int64_t h = 0;
        while (r > 0) {
            c.reward_schedule.push_back({h, r});
            h += 840'000;
            r /= 2;
        }
    } else {
        throw UnknownPresetError("unknown coin preset: " + label);
    }
    c.validate();
    return c;
}

std::vector<std::string> preset_names() { return {"BTC", "UNO", "DOGE", "LTC"}; }

double PriceModel::price_at(double t) const {
    switch (family) {
    case PriceFamily::Fixed:
        return fixed_price;
    case PriceFamily::ExogenousSeries: {
        if (series.empty())
            return fixed_price;
        double p = series.front().second;
        for (const auto& [ts, v] : series) {
            if (ts > t)
                break;
            p = v;
        }
        return p;
    }
    case PriceFamily::Elastic:
        return std::max(0.0, elastic_base * (1.0 + elastic_demand));
    }
    return fixed_price;
}

PriceModel load_price_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw SimError("cannot open price series: " + path);
    PriceModel m;
    m.family = PriceFamily::ExogenousSeries;
    std::string line;
    if (!std::getline(in, line) || line.rfind("time_s,price", 0) != 0)
        throw ParseError(path + ": expected header 'time_s,price'");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::istringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b))
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad row");
        m.series.emplace_back(std::stod(a), std::stod(b));
    }
    std::sort(m.series.begin(), m.series.end());
    return m;
}

double profitability(const MinerActor& miner, const CoinMarketState& state) {
    if (!(state.total_hash_rate > 0))
        throw SimError("profitability: coin hash rate must be > 0");
    double block_time = state.block_time_actual;
    if (!(block_time > 0))
        throw SimError("profitability: block_time_actual must be > 0");
    double block_value = to_coins(state.next_reward) * state.price + state.mean_fees_value;
    double share = miner.hash_rate / state.total_hash_rate;
    return block_value * share / block_time - miner.electricity_cost;
}

std::vector<MigrationDelta> migrate(const HashMarket& market, std::vector<MinerActor>& miners,
                                    const std::map<std::string, CoinMarketState>& coins,
                                    RngStream& rng) {
    std::vector<MigrationDelta> deltas;
    if (coins.empty())
        return deltas;

    // Movers update the hash totals later candidates see, so a flow stops on
    // its own once the per-hash income evens out instead of stampeding a coin
    // empty within one tick.
    struct Live {
        double hash;
        double value;      // currency per block
        double block_time; // fixed for the tick
    };
    std::map<std::string, Live> live;
    for (const auto& [label, st] : coins) {
        if (st.block_time_actual <= 0)
            continue;
        live.emplace(label, Live{st.total_hash_rate,
                                 to_coins(st.next_reward) * st.price + st.mean_fees_value,
                                 st.block_time_actual});
    }
    auto per_hash = [&](const std::string& label) {
        auto it = live.find(label);
        if (it == live.end() || it->second.hash <= 0)
            return -1.0;
        return it->second.value / (it->second.hash * it->second.block_time);
    };

    double movable_hash = 0.0;
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < miners.size(); ++i) {
        if (!miners[i].migratory)
            continue;
        candidates.push_back(i);
        movable_hash += miners[i].hash_rate;
    }
    double budget = market.migration_responsiveness * movable_hash;

    // Seeded shuffle: the per-tick movement cap must not always favor the
    // same miners.
    for (std::size_t i = candidates.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.uniform_below(i));
        std::swap(candidates[i - 1], candidates[j]);
    }

    for (std::size_t ci : candidates) {
        if (budget <= 0)
            break;
        MinerActor& m = miners[ci];
        std::string best_coin;
        double best = 0.0;
        for (const auto& [label, st] : live) {
            // Income for this miner if it joined the coin.
            double joined = m.coin_assignment == label ? st.hash : st.hash + m.hash_rate;
            if (joined <= 0)
                continue;
            double p = st.value / (joined * st.block_time) * m.hash_rate - m.electricity_cost;
            if (best_coin.empty() || p > best) {
                best_coin = label;
                best = p;
            }
        }
        if (best_coin.empty())
            continue;
        if (best < 0) {
            // Unprofitable everywhere: switch off.
            if (!m.coin_assignment.empty()) {
                deltas.push_back({m.id, m.coin_assignment, ""});
                auto from = live.find(m.coin_assignment);
                if (from != live.end())
                    from->second.hash -= m.hash_rate;
                m.coin_assignment.clear();
                budget -= m.hash_rate;
            }
            continue;
        }
        if (m.coin_assignment == best_coin)
            continue;
        double current = -m.electricity_cost;
        if (double ph = per_hash(m.coin_assignment); ph >= 0)
            current = ph * m.hash_rate - m.electricity_cost;
        bool idle = m.coin_assignment.empty();
        if (idle || best > current * (1.0 + market.hysteresis)) {
            deltas.push_back({m.id, m.coin_assignment, best_coin});
            auto from = live.find(m.coin_assignment);
            if (from != live.end())
                from->second.hash -= m.hash_rate;
            auto to = live.find(best_coin);
            if (to != live.end())
                to->second.hash += m.hash_rate;
            m.coin_assignment = best_coin;
            budget -= m.hash_rate;
        }
    }
    return deltas;
}

double investor_return(double first_period_income, double decay, std::int64_t periods) {
    if (periods < 0) {
        if (!(decay > 0.0) || decay >= 1.0)
            throw DivergentSeriesError("investor_return: unbounded series needs 0 < decay < 1");
        return first_period_income / (1.0 - decay);
    }
    if (periods == 0)
        return 0.0;
    if (decay == 1.0)
        return first_period_income * static_cast<double>(periods);
    return first_period_income * (1.0 - std::pow(decay, static_cast<double>(periods))) / (1.0 - decay);
}

double attack_cost_estimate(const CoinSpec& coin, std::int64_t next_height,
                            std::int64_t blocks_to_mine, double premium, double price,
                            const HashMarket& market, bool family_has_alternative) {
    if (blocks_to_mine == 0)
        return 0.0;
    if (market.rental_hash <= 0 && !family_has_alternative)
        throw InsufficientRentableHashError(
            "attack_cost_estimate: no rental pool and no displacement capacity in family " +
            market.family);
    double block_value = to_coins(reward_at(coin, next_height)) * price;
    return static_cast<double>(blocks_to_mine) * block_value * (1.0 + premium);
}

} // namespace chainlab
