#pragma once

#include <cstdint>
#include <cstring>
#include <deque>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "chainlab/errors.hpp"
#include "chainlab/hash.hpp"
#include "chainlab/ids.hpp"
#include "chainlab/sig.hpp"

namespace chainlab {

struct OutputRef {
    Hash256 tx_id{};
    std::uint32_t index = 0;

    friend bool operator==(const OutputRef&, const OutputRef&) = default;
    friend auto operator<=>(const OutputRef&, const OutputRef&) = default;
};

struct OutputRefHash {
    std::size_t operator()(const OutputRef& r) const {
        std::uint64_t h;
        std::memcpy(&h, r.tx_id.data(), 8);
        return static_cast<std::size_t>(h ^ (std::uint64_t(r.index) * 0x9e3779b97f4a7c15ULL));
    }
};

struct TxInput {
    OutputRef source;
    Signature sig;
};

struct TxOutput {
    std::uint64_t recipient_key = 0;
    Amount amount = 0;
};

struct Transaction {
    Hash256 tx_id{};
    std::vector<TxInput> inputs;
    std::vector<TxOutput> outputs;
    Amount fee = 0;
    double created_at = 0.0;                    // originator-claimed timestamp
    std::map<NodeId, double> first_seen;        // per-node observation time

    // Digest over normalized content: signatures in low-s form, fields in a
    // fixed serialization order. Malleated signature copies hash identically.
    Hash256 compute_id() const;

    Amount input_total() const;
    Amount output_total() const;
};

// Builds a transaction, checks value conservation, fills tx_id.
Transaction make_transaction(std::vector<TxInput> inputs, std::vector<TxOutput> outputs,
                             Amount fee, double created_at);

struct Block {
    Hash256 id{};
    Hash256 prev{};
    std::string coin;
    std::int64_t height = 0;
    std::int32_t version = 1;
    ActorId miner = kNoActor;
    double timestamp = 0.0;
    std::vector<Transaction> txs;
    Amount reward = 0;
    double work = 0.0; // expected hashes spent on this block
    Hash256 merkle{};  // digest over tx ids; computed, not proven

    Hash256 compute_id() const;
    Hash256 compute_merkle() const;
};

struct DoubleSpendEntry {
    Hash256 victim_tx{};
    Hash256 replacing_tx{};
};

struct ReorgReport {
    Hash256 old_tip{};
    Hash256 new_tip{};
    std::vector<Hash256> detached; // leaving the main chain, tip-down order
    std::vector<Hash256> attached; // joining it, fork-point-up order
    std::vector<Hash256> reversed_txs;
    std::vector<DoubleSpendEntry> double_spent;
};

struct NoChange {
    bool extended_main = false; // true when the block advanced the main tip
};

using AcceptResult = std::variant<NoChange, ReorgReport>;

enum class AcceptStatus { Accepted, Staged, Duplicate, Rejected };

struct ForkStatistics {
    double fork_rate = 0.0;                       // stale blocks / total blocks
    std::map<int, std::int64_t> depth_histogram;  // maximal abandoned-branch depth -> count
    std::int64_t total_blocks = 0;
    std::int64_t stale_blocks = 0;
    bool low_confidence = false; // fewer than 1000 blocks observed
};

struct Hash256Hasher {
    std::size_t operator()(const Hash256& h) const {
        std::uint64_t v;
        std::memcpy(&v, h.data(), 8);
        return static_cast<std::size_t>(v);
    }
};

// Per-node view of one coin's block DAG under the longest-chain rule.
// Tip selection maximizes cumulative expected work; among equal-work tips the
// first-received branch wins, so a challenger must strictly exceed.
class BlockTree {
public:
    using RewardFn = std::function<Amount(std::int64_t height)>;
    // Node-local acceptability hook (defense variants veto blocks here).
    using BlockFilter = std::function<bool(const Block&)>;
    using BlockPtr = std::shared_ptr<const Block>;

    explicit BlockTree(Block genesis, RewardFn reward_fn = nullptr);
    explicit BlockTree(BlockPtr genesis, RewardFn reward_fn = nullptr);

    // Validates and inserts. Unknown parent -> bounded staging buffer, retried
    // on each later accept. Returns the reorg report when the main tip moved
    // to a different branch. Block payloads are immutable and shared between
    // per-node trees.
    AcceptResult accept_block(const Block& block, double node_local_time);
    AcceptResult accept_block(BlockPtr block, double node_local_time);
    AcceptStatus last_status() const { return last_status_; }

    void set_block_filter(BlockFilter f) { filter_ = std::move(f); }

    std::int64_t confirmations(const Hash256& tx_id) const;

    const Hash256& main_tip() const { return rec_[main_tip_].block->id; }
    std::int64_t main_height() const { return rec_[main_tip_].block->height; }
    double main_work() const { return rec_[main_tip_].cum_work; }
    std::size_t block_count() const { return rec_.size(); }
    std::size_t staged_count() const { return staging_.size(); }

    bool contains(const Hash256& id) const { return index_.count(id) != 0; }
    const Block* find(const Hash256& id) const;
    // Block on the main chain at the given height (walks down from the tip).
    const Block* main_block_at(std::int64_t height) const;
    bool on_main_chain(const Hash256& id) const;
    double cumulative_work(const Hash256& id) const;

    // Total coins minted along the main chain (genesis included).
    Amount minted_supply() const;

    ForkStatistics fork_statistics() const;

    std::vector<Hash256> tips() const;

    // Main chain ids from genesis to tip.
    std::vector<Hash256> main_chain() const;

    // One block per line: coin id prev height miner time work tx_count.
    void export_records(std::ostream& os) const;

    static constexpr std::size_t kStagingLimit = 1000;

private:
    struct Rec {
        BlockPtr block;
        std::uint32_t parent = 0;
        double cum_work = 0.0;
        double received_at = 0.0;
        bool on_main = false;
        bool is_tip = true;
        // Walking to the nearest ancestor that carries transactions keeps
        // double-spend validation cheap on mostly-empty chains.
        std::uint32_t prev_with_txs = kNone;
    };
    static constexpr std::uint32_t kNone = 0xffffffffu;

    std::uint32_t idx(const Hash256& id) const;
    void validate(const Block& block, std::uint32_t parent) const;
    AcceptResult insert(BlockPtr block, std::uint32_t parent, double t);
    ReorgReport switch_main(std::uint32_t new_tip);
    std::uint32_t fork_point(std::uint32_t a, std::uint32_t b) const;

    std::vector<Rec> rec_;
    std::unordered_map<Hash256, std::uint32_t, Hash256Hasher> index_;
    std::uint32_t main_tip_ = 0;
    RewardFn reward_fn_;
    BlockFilter filter_;
    std::deque<BlockPtr> staging_;
    std::unordered_map<Hash256, std::int64_t, Hash256Hasher> tx_to_height_; // main chain only
    Amount minted_ = 0;
    AcceptStatus last_status_ = AcceptStatus::Accepted;
};

// Partitions transactions so any two spending a common output land in the
// same conflict set. Singleton sets are dropped.
std::vector<std::vector<Hash256>> detect_conflicts(const std::vector<Transaction>& mempool);

} // namespace chainlab
