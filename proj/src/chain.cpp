#include "chainlab/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace chainlab {

Amount Transaction::input_total() const {
    Amount t = 0;
    for (const auto& o : outputs)
        t += o.amount;
    return t + fee;
}

Amount Transaction::output_total() const {
    Amount t = 0;
    for (const auto& o : outputs)
        t += o.amount;
    return t;
}

Hash256 Transaction::compute_id() const {
    HashWriter w;
    w.str("tx");
    w.u64(inputs.size());
    for (const auto& in : inputs) {
        w.bytes(in.source.tx_id).u32(in.source.index);
        NormalizedSignature n = normalize_signature(in.sig);
        for (auto l : n.r.limb)
            w.u64(l);
        for (auto l : n.s.limb)
            w.u64(l);
        w.u64(n.key_id);
    }
    w.u64(outputs.size());
    for (const auto& o : outputs)
        w.u64(o.recipient_key).i64(o.amount);
    w.i64(fee);
    w.f64(created_at);
    return w.digest();
}

Transaction make_transaction(std::vector<TxInput> inputs, std::vector<TxOutput> outputs,
                             Amount fee, double created_at) {
    Transaction tx;
    tx.inputs = std::move(inputs);
    tx.outputs = std::move(outputs);
    tx.fee = fee;
    tx.created_at = created_at;
    tx.tx_id = tx.compute_id();
    return tx;
}

Hash256 Block::compute_merkle() const {
    HashWriter w;
    w.str("merkle").u64(txs.size());
    for (const auto& tx : txs)
        w.bytes(tx.tx_id);
    return w.digest();
}

Hash256 Block::compute_id() const {
    HashWriter w;
    w.str("blk").str(coin).bytes(prev).i64(height).u32(static_cast<std::uint32_t>(version));
    w.u32(miner).f64(timestamp).bytes(merkle).i64(reward).f64(work);
    return w.digest();
}

namespace {
Block finalize_genesis(Block g) {
    g.height = 0;
    g.prev = null_hash();
    if (is_zero(g.merkle))
        g.merkle = g.compute_merkle();
    if (is_zero(g.id))
        g.id = g.compute_id();
    return g;
}
} // namespace

BlockTree::BlockTree(Block genesis, RewardFn reward_fn)
    : BlockTree(std::make_shared<const Block>(finalize_genesis(std::move(genesis))),
                std::move(reward_fn)) {}

BlockTree::BlockTree(BlockPtr genesis, RewardFn reward_fn) : reward_fn_(std::move(reward_fn)) {
    if (!genesis || genesis->height != 0 || !is_zero(genesis->prev) || is_zero(genesis->id))
        throw SimError("BlockTree: malformed genesis");
    Rec r;
    r.block = std::move(genesis);
    r.parent = kNone;
    r.cum_work = r.block->work;
    r.on_main = true;
    r.is_tip = true;
    r.prev_with_txs = kNone;
    rec_.push_back(std::move(r));
    index_.emplace(rec_[0].block->id, 0);
    minted_ = rec_[0].block->reward;
    for (const auto& tx : rec_[0].block->txs)
        tx_to_height_.emplace(tx.tx_id, 0);
}

std::uint32_t BlockTree::idx(const Hash256& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? kNone : it->second;
}

const Block* BlockTree::find(const Hash256& id) const {
    auto i = idx(id);
    return i == kNone ? nullptr : rec_[i].block.get();
}

const Block* BlockTree::main_block_at(std::int64_t height) const {
    if (height < 0 || height > rec_[main_tip_].block->height)
        return nullptr;
    std::uint32_t i = main_tip_;
    while (rec_[i].block->height > height)
        i = rec_[i].parent;
    return rec_[i].block.get();
}

bool BlockTree::on_main_chain(const Hash256& id) const {
    auto i = idx(id);
    return i != kNone && rec_[i].on_main;
}

double BlockTree::cumulative_work(const Hash256& id) const {
    auto i = idx(id);
    return i == kNone ? 0.0 : rec_[i].cum_work;
}

void BlockTree::validate(const Block& block, std::uint32_t parent) const {
    const Rec& p = rec_[parent];
    if (block.height != p.block->height + 1)
        throw SimError("accept_block: height " + std::to_string(block.height) +
                       " does not extend parent height " + std::to_string(p.block->height));
    if (reward_fn_) {
        Amount expect = reward_fn_(block.height);
        if (block.reward != expect)
            throw InvalidRewardError("accept_block: reward " + std::to_string(block.reward) +
                                     " != schedule value " + std::to_string(expect) +
                                     " at height " + std::to_string(block.height));
    }
    if (block.txs.empty())
        return;

    // No output may be spent twice within the block or anywhere on the chain
    // back to the root.
    std::unordered_map<OutputRef, const Transaction*, OutputRefHash> spent;
    for (const auto& tx : block.txs)
        for (const auto& in : tx.inputs) {
            auto [it, fresh] = spent.emplace(in.source, &tx);
            if (!fresh)
                throw IntraChainDoubleSpendError("accept_block: output spent twice within block");
        }
    for (std::uint32_t a = p.block->txs.empty() ? p.prev_with_txs : parent; a != kNone;
         a = rec_[a].prev_with_txs) {
        for (const auto& tx : rec_[a].block->txs)
            for (const auto& in : tx.inputs)
                if (spent.count(in.source))
                    throw IntraChainDoubleSpendError(
                        "accept_block: output already spent at height " +
                        std::to_string(rec_[a].block->height));
    }
}

AcceptResult BlockTree::accept_block(const Block& block, double node_local_time) {
    Block copy = block;
    if (is_zero(copy.merkle))
        copy.merkle = copy.compute_merkle();
    if (is_zero(copy.id))
        copy.id = copy.compute_id();
    return accept_block(std::make_shared<const Block>(std::move(copy)), node_local_time);
}

AcceptResult BlockTree::accept_block(BlockPtr block, double node_local_time) {
    if (contains(block->id)) {
        last_status_ = AcceptStatus::Duplicate;
        return NoChange{};
    }
    std::uint32_t parent = idx(block->prev);
    if (parent == kNone) {
        last_status_ = AcceptStatus::Staged;
        if (staging_.size() >= kStagingLimit)
            staging_.pop_front();
        staging_.push_back(std::move(block));
        return NoChange{};
    }
    validate(*block, parent);
    if (filter_ && !filter_(*block)) {
        last_status_ = AcceptStatus::Rejected;
        return NoChange{};
    }
    last_status_ = AcceptStatus::Accepted;
    return insert(std::move(block), parent, node_local_time);
}

AcceptResult BlockTree::insert(BlockPtr block, std::uint32_t parent, double t) {
    auto add = [&](BlockPtr b, std::uint32_t par) {
        Rec r;
        r.block = std::move(b);
        r.parent = par;
        r.cum_work = rec_[par].cum_work + r.block->work;
        r.received_at = t;
        r.on_main = false;
        r.is_tip = true;
        r.prev_with_txs = rec_[par].block->txs.empty() ? rec_[par].prev_with_txs : par;
        rec_[par].is_tip = false;
        std::uint32_t i = static_cast<std::uint32_t>(rec_.size());
        rec_.push_back(std::move(r));
        index_.emplace(rec_[i].block->id, i);
        return i;
    };

    add(std::move(block), parent);

    // A staged orphan may now connect; keep retrying until a full pass sticks.
    bool progress = true;
    while (progress && !staging_.empty()) {
        progress = false;
        for (std::size_t n = staging_.size(), k = 0; k < n; ++k) {
            BlockPtr b = std::move(staging_.front());
            staging_.pop_front();
            std::uint32_t par = idx(b->prev);
            if (par == kNone || contains(b->id)) {
                if (!contains(b->id))
                    staging_.push_back(std::move(b));
                continue;
            }
            try {
                validate(*b, par);
            } catch (const SimError&) {
                continue; // drop invalid orphan
            }
            if (filter_ && !filter_(*b))
                continue;
            add(std::move(b), par);
            progress = true;
        }
    }

    // Tip selection: strictly greater cumulative work wins; among equal
    // maxima the earliest-inserted (first received) branch is kept.
    std::uint32_t best = main_tip_;
    double best_work = rec_[main_tip_].cum_work;
    for (std::uint32_t i = 0; i < rec_.size(); ++i) {
        if (!rec_[i].is_tip)
            continue;
        if (rec_[i].cum_work > best_work) {
            best = i;
            best_work = rec_[i].cum_work;
        }
    }
    if (best == main_tip_)
        return NoChange{};
    std::uint32_t old_main = main_tip_;
    ReorgReport report = switch_main(best);
    if (fork_point(old_main, best) == old_main)
        return NoChange{true}; // pure extension, nothing detached
    return report;
}

std::uint32_t BlockTree::fork_point(std::uint32_t a, std::uint32_t b) const {
    while (rec_[a].block->height > rec_[b].block->height)
        a = rec_[a].parent;
    while (rec_[b].block->height > rec_[a].block->height)
        b = rec_[b].parent;
    while (a != b) {
        a = rec_[a].parent;
        b = rec_[b].parent;
    }
    return a;
}

ReorgReport BlockTree::switch_main(std::uint32_t new_tip) {
    std::uint32_t old_tip = main_tip_;
    std::uint32_t fp = fork_point(old_tip, new_tip);

    ReorgReport report;
    report.old_tip = rec_[old_tip].block->id;
    report.new_tip = rec_[new_tip].block->id;

    std::unordered_map<Hash256, const Transaction*, Hash256Hasher> detached_txs;
    for (std::uint32_t i = old_tip; i != fp; i = rec_[i].parent) {
        report.detached.push_back(rec_[i].block->id);
        rec_[i].on_main = false;
        minted_ -= rec_[i].block->reward;
        for (const auto& tx : rec_[i].block->txs) {
            tx_to_height_.erase(tx.tx_id);
            detached_txs.emplace(tx.tx_id, &tx);
        }
    }
    std::vector<std::uint32_t> path;
    for (std::uint32_t i = new_tip; i != fp; i = rec_[i].parent)
        path.push_back(i);
    std::reverse(path.begin(), path.end());
    std::unordered_map<OutputRef, Hash256, OutputRefHash> attached_spends;
    for (std::uint32_t i : path) {
        report.attached.push_back(rec_[i].block->id);
        rec_[i].on_main = true;
        minted_ += rec_[i].block->reward;
        for (const auto& tx : rec_[i].block->txs) {
            tx_to_height_.emplace(tx.tx_id, rec_[i].block->height);
            detached_txs.erase(tx.tx_id);
            for (const auto& in : tx.inputs)
                attached_spends.emplace(in.source, tx.tx_id);
        }
    }
    // Reversed: confirmed before, gone now. Double spent: a reversed
    // transaction whose input was re-spent by a different transaction on the
    // winning branch.
    for (const auto& [txid, tx] : detached_txs) {
        report.reversed_txs.push_back(txid);
        for (const auto& in : tx->inputs) {
            auto it = attached_spends.find(in.source);
            if (it != attached_spends.end() && !(it->second == txid)) {
                report.double_spent.push_back({txid, it->second});
                break;
            }
        }
    }
    main_tip_ = new_tip;
    return report;
}

std::int64_t BlockTree::confirmations(const Hash256& tx_id) const {
    auto it = tx_to_height_.find(tx_id);
    if (it == tx_to_height_.end())
        return 0;
    return rec_[main_tip_].block->height - it->second + 1;
}

Amount BlockTree::minted_supply() const { return minted_; }

std::vector<Hash256> BlockTree::tips() const {
    std::vector<Hash256> out;
    for (const auto& r : rec_)
        if (r.is_tip)
            out.push_back(r.block->id);
    return out;
}

std::vector<Hash256> BlockTree::main_chain() const {
    std::vector<Hash256> out;
    for (std::uint32_t i = main_tip_;; i = rec_[i].parent) {
        out.push_back(rec_[i].block->id);
        if (rec_[i].parent == kNone)
            break;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

ForkStatistics BlockTree::fork_statistics() const {
    ForkStatistics fs;
    fs.total_blocks = static_cast<std::int64_t>(rec_.size());
    for (std::uint32_t i = 0; i < rec_.size(); ++i) {
        const Rec& r = rec_[i];
        if (!r.on_main)
            ++fs.stale_blocks;
        if (r.is_tip && !r.on_main) {
            std::uint32_t fp = fork_point(i, main_tip_);
            int depth = static_cast<int>(r.block->height - rec_[fp].block->height);
            ++fs.depth_histogram[depth];
        }
    }
    fs.fork_rate = fs.total_blocks > 0
                       ? static_cast<double>(fs.stale_blocks) / static_cast<double>(fs.total_blocks)
                       : 0.0;
    fs.low_confidence = fs.total_blocks < 1000;
    return fs;
}

void BlockTree::export_records(std::ostream& os) const {
    for (const auto& r : rec_) {
        const Block& b = *r.block;
        os << b.coin << ' ' << to_hex(b.id) << ' ' << to_hex(b.prev) << ' ' << b.height << ' '
           << b.miner << ' ' << b.timestamp << ' ' << b.work << ' ' << b.txs.size() << '\n';
    }
}

std::vector<std::vector<Hash256>> detect_conflicts(const std::vector<Transaction>& mempool) {
    std::size_t n = mempool.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    auto unite = [&](std::size_t a, std::size_t b) { parent[find(a)] = find(b); };

    std::unordered_map<OutputRef, std::size_t, OutputRefHash> owner;
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& in : mempool[i].inputs) {
            auto [it, fresh] = owner.emplace(in.source, i);
            if (!fresh)
                unite(i, it->second);
        }
    }
    // Unions only happen on shared outputs, so every group of size >= 2 is a
    // conflict set.
    std::unordered_map<std::size_t, std::size_t> group_size;
    for (std::size_t i = 0; i < n; ++i)
        ++group_size[find(i)];
    std::vector<std::vector<Hash256>> out;
    std::unordered_map<std::size_t, std::size_t> group_index;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t root = find(i);
        if (group_size[root] < 2)
            continue;
        auto [it, fresh] = group_index.emplace(root, out.size());
        if (fresh)
            out.emplace_back();
        out[it->second].push_back(mempool[i].tx_id);
    }
    return out;
}

} // namespace chainlab
