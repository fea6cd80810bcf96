#include "chainlab/mining.hpp"

#include <algorithm>
#include <cmath>

namespace chainlab {

Difficulty retarget(const Difficulty& d, double actual_elapsed_seconds) {
    Difficulty out = d;
    double expected = d.target_block_time * static_cast<double>(d.retarget_interval_blocks);
    double factor = expected / std::max(actual_elapsed_seconds, 1e-9);
    factor = std::clamp(factor, 0.25, 4.0);
    out.expected_hashes_per_block = d.expected_hashes_per_block * factor;
    return out;
}

double mine_step_delay(double hash_rate, const Difficulty& d, RngStream& stream) {
    if (!(hash_rate > 0))
        throw NonPositiveRateError("mine_step_delay: hash_rate must be > 0");
    return stream.exponential(hash_rate / d.expected_hashes_per_block);
}

WorkItem issue_work(const PoolActor& pool, const BlockTemplate& tmpl, double target_zeros,
                    RngStream& pool_stream) {
    WorkItem item;
    for (std::size_t i = 0; i < 4; ++i) {
        std::uint64_t w = pool_stream.next_u64();
        for (int b = 0; b < 8; ++b)
            item.h0[8 * i + b] = static_cast<std::uint8_t>(w >> (8 * b));
    }
    item.target_zeros = target_zeros;
    if (pool.work_protocol == WorkProtocol::StratumLike) {
        item.prev_id_disclosed = tmpl.parent;
        item.coin_disclosed = tmpl.coin;
    }
    return item;
}

RedirectCheck detect_redirect(const WorkItem& item, const Hash256& local_main_tip,
                              const std::vector<Hash256>& recent_tips) {
    if (!item.prev_id_disclosed)
        return RedirectCheck::Undetectable;
    if (*item.prev_id_disclosed == local_main_tip)
        return RedirectCheck::Consistent;
    for (const auto& t : recent_tips)
        if (*item.prev_id_disclosed == t)
            return RedirectCheck::Consistent;
    return RedirectCheck::Redirected;
}

double expected_share_count(double hash_rate, double window_seconds, std::int32_t share_zeros) {
    return hash_rate * window_seconds / std::pow(2.0, static_cast<double>(share_zeros));
}

std::vector<Share> generate_shares(ActorId miner, double hash_rate, double t0, double window,
                                   const Difficulty& difficulty, std::int32_t share_zeros,
                                   RngStream& stream, const Hash256& work_h0) {
    if (static_cast<double>(share_zeros) > difficulty.target_zeros() + 1e-9)
        throw ThresholdAboveDifficultyError("generate_shares: share threshold " +
                                            std::to_string(share_zeros) + " above difficulty " +
                                            std::to_string(difficulty.target_zeros()));
    double mean = expected_share_count(hash_rate, window, share_zeros);
    std::uint64_t count = stream.poisson(mean);
    std::vector<Share> shares;
    shares.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        Share s;
        s.miner = miner;
        s.work_h0 = work_h0;
        s.found_at = t0 + stream.uniform01() * window;
        s.zeros = share_zeros;
        while (stream.bernoulli(0.5)) // each extra leading zero is a coin flip
            ++s.zeros;
        shares.push_back(s);
    }
    std::sort(shares.begin(), shares.end(),
              [](const Share& a, const Share& b) { return a.found_at < b.found_at; });
    return shares;
}

std::optional<Block> apply_aux_pow(const Block& parent_block, const CoinSpec& child_coin,
                                   const Difficulty& child_difficulty, std::int64_t child_height,
                                   const Hash256& child_parent, Amount child_reward) {
    if (!child_coin.merged_mining_parent)
        return std::nullopt;
    if (parent_block.work < child_difficulty.expected_hashes_per_block)
        return std::nullopt;
    Block child;
    child.coin = child_coin.label;
    child.prev = child_parent;
    child.height = child_height;
    child.miner = parent_block.miner;
    child.timestamp = parent_block.timestamp;
    child.reward = child_reward;
    child.work = child_difficulty.expected_hashes_per_block;
    child.merkle = parent_block.id; // reference to the parent proof
    child.id = child.compute_id();
    return child;
}

} // namespace chainlab
