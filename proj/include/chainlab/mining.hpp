#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chainlab/chain.hpp"
#include "chainlab/econ.hpp"
#include "chainlab/errors.hpp"
#include "chainlab/hash.hpp"
#include "chainlab/rng.hpp"

namespace chainlab {

// Difficulty tracked as expected hashes per block; target_zeros is its log2.
// The simulator never grinds nonces, only expected work matters.
struct Difficulty {
    std::string coin;
    double expected_hashes_per_block = 1.0;
    std::int64_t retarget_interval_blocks = 2016;
    double target_block_time = 600.0;

    double target_zeros() const { return std::log2(expected_hashes_per_block); }
};

// Scale factor (target_time * interval) / actual_elapsed, clamped to [1/4, 4]
// per retarget.
Difficulty retarget(const Difficulty& d, double actual_elapsed_seconds);

// Draw the next solve delay for an actor: Exponential(hash_rate / difficulty).
double mine_step_delay(double hash_rate, const Difficulty& d, RngStream& stream);

enum class ManagerStrategy { Honest, HiddenFork, CrossCoinRedirect, Cartel };
enum class WorkProtocol { H0Only, StratumLike };

struct PoolActor {
    ActorId id = 0;
    std::string name;
    std::set<ActorId> members;
    ManagerStrategy manager_strategy = ManagerStrategy::Honest;
    WorkProtocol work_protocol = WorkProtocol::H0Only;
    std::string coin; // coin the pool advertises to members
};

struct WorkItem {
    Hash256 h0{}; // opaque midstate; the miner cannot interpret it
    std::optional<Hash256> prev_id_disclosed;
    std::optional<std::string> coin_disclosed;
    double target_zeros = 0.0;
};

// What the pool intends the work to build on. Under h0_only the miner's view
// of the resulting WorkItem is identical whatever the template says.
struct BlockTemplate {
    Hash256 parent{};
    std::string coin;
};

// h0 comes from the pool's own stream: the real midstate is a hash the miner
// has no way to invert, so an opaque draw models exactly what the miner can
// see. The (h0 -> template) binding stays manager-side.
WorkItem issue_work(const PoolActor& pool, const BlockTemplate& tmpl, double target_zeros,
                    RngStream& pool_stream);

enum class RedirectCheck { Consistent, Redirected, Undetectable };

// Stratum-style check: the disclosed previous block must be a recent known
// tip. h0-only work items carry nothing to check.
RedirectCheck detect_redirect(const WorkItem& item, const Hash256& local_main_tip,
                              const std::vector<Hash256>& recent_tips = {});

struct Share {
    ActorId miner = 0;
    Hash256 work_h0{};
    std::int32_t zeros = 0; // leading zero bits achieved
    double found_at = 0.0;
};

// Expected share count for a window: hash_rate * window / 2^share_zeros.
double expected_share_count(double hash_rate, double window_seconds, std::int32_t share_zeros);

// Sample the shares a miner produces in [t0, t0 + window). Count is Poisson
// with the mean above; each share's achieved zeros exceed the threshold
// geometrically (every extra zero halves the count).
std::vector<Share> generate_shares(ActorId miner, double hash_rate, double t0, double window,
                                   const Difficulty& difficulty, std::int32_t share_zeros,
                                   RngStream& stream, const Hash256& work_h0 = {});

// Merged mining: a parent-coin block whose work meets the child difficulty
// also produces a child block referencing the parent proof.
std::optional<Block> apply_aux_pow(const Block& parent_block, const CoinSpec& child_coin,
                                   const Difficulty& child_difficulty, std::int64_t child_height,
                                   const Hash256& child_parent, Amount child_reward);

} // namespace chainlab
