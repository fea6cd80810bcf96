#include "chainlab/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace chainlab {

namespace {

Block make_genesis(const CoinSpec& spec) {
    Block g;
    g.coin = spec.label;
    g.height = 0;
    g.miner = kNoActor;
    g.timestamp = 0.0;
    g.reward = reward_at(spec, 0);
    g.work = 0.0;
    g.merkle = g.compute_merkle();
    g.id = g.compute_id();
    return g;
}

} // namespace

Engine::Engine(SimSetup setup)
    : setup_(std::move(setup)),
      net_stream_(setup_.master_seed, "net"),
      market_stream_(setup_.master_seed, "market") {
    build_world();
    seed_mining();
}

int Engine::coin_of(const std::string& label) const {
    auto it = coin_index_.find(label);
    if (it == coin_index_.end())
        throw DanglingReferenceError("unknown coin: " + label);
    return it->second;
}

void Engine::build_world() {
    if (setup_.coins.empty())
        throw SimError("engine: no coins configured");

    for (const auto& cs : setup_.coins) {
        cs.spec.validate();
        coin_index_.emplace(cs.spec.label, static_cast<int>(coins_.size()));
        CoinRt rt;
        rt.spec = cs.spec;
        rt.price = cs.price;
        rt.diff.coin = cs.spec.label;
        rt.diff.retarget_interval_blocks = cs.spec.retarget_interval;
        rt.diff.target_block_time = cs.spec.block_time_target;
        rt.diff.expected_hashes_per_block = cs.initial_hashes_per_block;
        coins_.push_back(std::move(rt));
    }
    for (auto& rt : coins_) {
        if (rt.spec.merged_mining_parent) {
            auto it = coin_index_.find(*rt.spec.merged_mining_parent);
            if (it == coin_index_.end())
                throw DanglingReferenceError("merged mining parent not configured: " +
                                             *rt.spec.merged_mining_parent);
            rt.parent_coin = it->second;
        }
    }

    auto new_node = [&](const std::string& name) {
        NodeId id = static_cast<NodeId>(node_names_.size());
        node_names_.push_back(name);
        graph_.add_node(id);
        return id;
    };

    // Solo miners.
    for (const auto& ms : setup_.miners) {
        for (int i = 0; i < ms.count; ++i) {
            std::string name = ms.count == 1 ? ms.name : ms.name + "_" + std::to_string(i);
            Unit u;
            u.name = name;
            u.actor = static_cast<ActorId>(units_.size());
            u.hash_rate = ms.hash_rate;
            u.coin = ms.coin;
            u.node = new_node(name);
            u.stream = std::make_unique<RngStream>(setup_.master_seed, "miner/" + name);
            u.migratory = ms.migratory;
            u.accept_bribes = ms.accept_bribes;
            u.electricity = ms.electricity;
            if (!u.coin.empty())
                coin_of(u.coin); // validate reference
            unit_index_.emplace(name, units_.size());
            units_.push_back(std::move(u));
            honest_nodes_.push_back(units_.back().node);
        }
    }

    // Pools and their member rigs (members share the pool's node view).
    for (const auto& ps : setup_.pools) {
        PoolRt pool;
        pool.actor.id = static_cast<ActorId>(10000 + pools_.size());
        pool.actor.name = ps.name;
        pool.actor.manager_strategy = ps.strategy;
        pool.actor.work_protocol = ps.protocol;
        pool.actor.coin = ps.coin;
        pool.node = new_node("pool/" + ps.name);
        pool.redirect_coin = ps.redirect_coin;
        pool.work_stream = std::make_unique<RngStream>(setup_.master_seed, "pool/" + ps.name);
        coin_of(ps.coin);
        if (ps.strategy == ManagerStrategy::CrossCoinRedirect) {
            if (ps.redirect_coin.empty())
                throw DanglingReferenceError("pool " + ps.name + ": redirect coin missing");
            coin_of(ps.redirect_coin);
        }
        std::size_t pi = pools_.size();
        for (int m = 0; m < ps.members; ++m) {
            std::string name = ps.name + "/m" + std::to_string(m);
            Unit u;
            u.name = name;
            u.actor = static_cast<ActorId>(units_.size());
            u.hash_rate = ps.member_hash_rate;
            u.pool = static_cast<int>(pi);
            // The rig grinds whatever the manager's template targets; under
            // cross-coin redirection that is another coin's difficulty.
            u.coin = ps.strategy == ManagerStrategy::CrossCoinRedirect ? ps.redirect_coin : ps.coin;
            u.node = pool.node;
            u.stream = std::make_unique<RngStream>(setup_.master_seed, "miner/" + name);
            pool.actor.members.insert(u.actor);
            pool.member_units.push_back(units_.size());
            unit_index_.emplace(name, units_.size());
            units_.push_back(std::move(u));
        }
        bool honest_manager = ps.strategy == ManagerStrategy::Honest;
        if (honest_manager)
            honest_nodes_.push_back(pool.node);
        pool_index_.emplace(ps.name, pi);
        pools_.push_back(std::move(pool));
    }

    // Peers (observers / confirmers).
    bool saw_peer = false;
    for (const auto& ps : setup_.peers) {
        for (int i = 0; i < ps.count; ++i) {
            std::string name = ps.count == 1 ? ps.name : ps.name + "_" + std::to_string(i);
            NodeId n = new_node("peer/" + name);
            honest_nodes_.push_back(n);
            if (ps.confirmer)
                confirmer_nodes_.push_back(n);
            if (!saw_peer) {
                observer_ = n;
                saw_peer = true;
            }
        }
    }
    if (!saw_peer)
        observer_ = 0;

    // Attacks: a double-spend rig gets its own node; hidden forks ride a pool.
    for (const auto& as : setup_.attacks) {
        AttackRt atk;
        atk.setup = as;
        coin_of(as.coin);
        if (as.type == AttackSetup::Type::HiddenFork) {
            auto it = pool_index_.find(as.pool);
            if (it == pool_index_.end())
                throw DanglingReferenceError("attack references unknown pool: " + as.pool);
            atk.pool = static_cast<int>(it->second);
            atk.attacker_node = pools_[it->second].node;
            pools_[it->second].attack = static_cast<int>(attacks_.size());
        } else {
            atk.attacker_node = new_node("attacker/" + std::to_string(attacks_.size()));
            Unit u;
            u.name = "attacker/" + std::to_string(attacks_.size());
            u.actor = static_cast<ActorId>(units_.size());
            u.hash_rate = as.attacker_hash;
            u.coin = as.coin;
            u.node = atk.attacker_node;
            u.attack = static_cast<int>(attacks_.size());
            u.off = true; // idle until the trigger
            u.stream = std::make_unique<RngStream>(setup_.master_seed, "miner/" + u.name);
            atk.unit = static_cast<int>(units_.size());
            unit_index_.emplace(u.name, units_.size());
            units_.push_back(std::move(u));
        }
        attacks_.push_back(std::move(atk));
    }

    if (node_names_.empty())
        new_node("lonely");

    // Per-node trees, with defense/cartel filters on honest nodes.
    for (std::size_t ci = 0; ci < coins_.size(); ++ci) {
        CoinRt& rt = coins_[ci];
        if (rt.diff.expected_hashes_per_block <= 0) {
            double h = 0;
            for (const auto& u : units_)
                if (!u.off && u.coin == rt.spec.label)
                    h += u.hash_rate;
            rt.diff.expected_hashes_per_block = h > 0 ? h * rt.spec.block_time_target : 1.0;
        }
        Block genesis = make_genesis(rt.spec);
        rt.genesis = genesis.id;
        auto genesis_ptr = std::make_shared<const Block>(genesis);
        CoinSpec spec_copy = rt.spec;
        for (NodeId n = 0; n < node_names_.size(); ++n) {
            rt.trees.emplace_back(genesis_ptr,
                                  [spec_copy](std::int64_t h) { return reward_at(spec_copy, h); });
        }
    }

    // Cartel pools: members treat non-cartel blocks as invalid.
    for (auto& pool : pools_) {
        if (pool.actor.manager_strategy != ManagerStrategy::Cartel)
            continue;
        CartelPolicy policy = cartel_filter(pool.actor.members);
        int ci = coin_of(pool.actor.coin);
        coins_[ci].trees[pool.node].set_block_filter(
            [policy](const Block& b) { return policy.accepts(b.miner); });
    }

    // Defense filters for honest nodes: a block carrying a transaction that
    // loses adjudication (or lost the RPCA vote) is invalid.
    if (setup_.variant != DefenseVariant::Baseline) {
        for (std::size_t ci = 0; ci < coins_.size(); ++ci) {
            for (NodeId n : honest_nodes_)
                coins_[ci].trees[n].set_block_filter(
                    [this](const Block& b) { return block_ok_for_honest(b); });
        }
    }

    q_.enable_log(setup_.collect_event_log);

    // Standing schedules.
    if (setup_.market.enabled) {
        q_.schedule(setup_.market.market.tick_interval, EventKind::MarketTick,
                    [this] { on_market_tick(); });
    }
    if (setup_.metrics_interval > 0)
        q_.schedule(setup_.metrics_interval, EventKind::MarketTick, [this] { on_metrics_sample(); });

    bool want_shares = setup_.record_traces || variant_uses_shares(setup_.variant);
    for (std::size_t pi = 0; pi < pools_.size(); ++pi) {
        q_.schedule(setup_.work_cadence, EventKind::ConfirmerAction,
                    [this, pi] { on_work_push(pi); });
        if (want_shares)
            for (std::size_t ui : pools_[pi].member_units)
                q_.schedule(setup_.work_cadence, EventKind::ConfirmerAction,
                            [this, ui] { generate_share_window(ui, 0.0); });
    }

    for (std::size_t ai = 0; ai < attacks_.size(); ++ai) {
        q_.schedule(attacks_[ai].setup.trigger, EventKind::AttackPhase,
                    [this, ai] { on_attack_trigger(ai); });
    }

    for (std::size_t pi = 0; pi < setup_.payments.size(); ++pi) {
        const PaymentSetup& pay = setup_.payments[pi];
        int ci = coin_of(pay.coin);
        Signature sig;
        sig.r = U256::from_u64(7 + 2 * pi);
        sig.s = U256::from_u64(11 + 2 * pi);
        sig.key_id = 500 + pi;
        OutputRef funding;
        HashWriter w;
        w.str("payment-funding").u64(pi);
        funding.tx_id = w.digest();
        Transaction tx = make_transaction({{funding, sig}}, {{600 + pi, pay.amount}}, 0, pay.at);
        payment_txs_.push_back(tx.tx_id);
        q_.schedule(pay.at, EventKind::MsgArrival,
                    [this, ci, tx] { broadcast_tx(observer_, ci, tx, q_.now()); });
    }
}

double Engine::unit_rate(const Unit& u) const {
    int ci = coin_of(u.coin);
    return u.hash_rate / coins_[ci].diff.expected_hashes_per_block;
}

void Engine::schedule_unit(std::size_t ui) {
    Unit& u = units_[ui];
    if (u.has_pending) {
        q_.cancel(u.pending);
        u.has_pending = false;
    }
    if (u.has_child_pending) {
        q_.cancel(u.child_pending);
        u.has_child_pending = false;
    }
    if (u.off || u.coin.empty() || u.hash_rate <= 0)
        return;
    double delay = u.stream->exponential(unit_rate(u));
    u.pending = q_.schedule(q_.now() + delay, EventKind::BlockFound, [this, ui] { on_unit_found(ui); });
    u.has_pending = true;

    // Merged mining: child solutions the parent clock cannot cover.
    int ci = coin_of(u.coin);
    for (std::size_t k = 0; k < coins_.size(); ++k) {
        if (coins_[k].parent_coin != static_cast<int>(ci))
            continue;
        double pd = coins_[ci].diff.expected_hashes_per_block;
        double cd = coins_[k].diff.expected_hashes_per_block;
        if (cd < pd) {
            double residual = u.hash_rate / cd - u.hash_rate / pd;
            if (residual > 0) {
                double cdelay = u.stream->exponential(residual);
                u.child_pending = q_.schedule(q_.now() + cdelay, EventKind::BlockFound,
                                              [this, ui] { on_child_found(ui); });
                u.has_child_pending = true;
            }
        }
        break; // at most one merged child per parent in a scenario
    }
}

void Engine::reschedule_all_units_on(const std::string& coin) {
    for (std::size_t ui = 0; ui < units_.size(); ++ui)
        if (units_[ui].coin == coin && !units_[ui].off)
            schedule_unit(ui);
}

void Engine::seed_mining() {
    for (std::size_t ui = 0; ui < units_.size(); ++ui)
        schedule_unit(ui);
}

void Engine::run() {
    if (setup_.stop_after_attacks && !attacks_.empty()) {
        while (attacks_done_ < static_cast<std::int64_t>(attacks_.size()) &&
               q_.run_one(setup_.duration)) {
        }
        q_.finish_at(std::min(setup_.duration, q_.now()));
        return;
    }
    q_.run_until(setup_.duration);
}

BlockTree::BlockPtr Engine::make_block(int ci, const Hash256& parent, std::int64_t height,
                                       ActorId miner, double at, std::vector<Transaction> txs) {
    Block b;
    b.coin = coins_[ci].spec.label;
    b.prev = parent;
    b.height = height;
    b.miner = miner;
    b.timestamp = at;
    b.txs = std::move(txs);
    b.reward = reward_at(coins_[ci].spec, height);
    b.work = coins_[ci].diff.expected_hashes_per_block;
    b.merkle = b.compute_merkle();
    b.id = b.compute_id();
    return std::make_shared<const Block>(std::move(b));
}

void Engine::broadcast_block(NodeId origin, int ci, BlockTree::BlockPtr block) {
    auto arrivals = broadcast(graph_, origin, q_.now(), setup_.latency, net_stream_);
    for (const auto& a : arrivals) {
        if (a.node == origin) {
            on_arrival(origin, ci, block);
            continue;
        }
        q_.schedule(a.at, EventKind::MsgArrival,
                    [this, n = a.node, ci, block] { on_arrival(n, ci, block); });
    }
}

void Engine::broadcast_tx(NodeId origin, int ci, const Transaction& tx, double at) {
    auto [it, fresh] = tx_registry_.emplace(tx.tx_id, tx);
    if (fresh) {
        for (const auto& in : tx.inputs)
            spenders_[in.source].push_back(tx.tx_id);
    }
    auto arrivals = broadcast(graph_, origin, at, setup_.latency, net_stream_);
    for (const auto& a : arrivals) {
        Hash256 id = tx.tx_id;
        if (a.at <= q_.now()) {
            on_tx_arrival(a.node, ci, id, a.at);
        } else {
            q_.schedule(a.at, EventKind::MsgArrival,
                        [this, n = a.node, ci, id, t = a.at] { on_tx_arrival(n, ci, id, t); });
        }
    }
}

void Engine::add_evidence(const Hash256& tx_id, TimestampEvidence ev) {
    evidence_[tx_id].push_back(ev);
}

void Engine::on_tx_arrival(NodeId node, int ci, const Hash256& tx_id, double at) {
    auto it = tx_registry_.find(tx_id);
    if (it == tx_registry_.end())
        return;
    Transaction& tx = it->second;
    bool first_here = tx.first_seen.emplace(node, at).second;
    if (!first_here)
        return;

    bool honest = std::find(honest_nodes_.begin(), honest_nodes_.end(), node) != honest_nodes_.end();
    if (honest && variant_uses_timestamps(setup_.variant)) {
        TimestampEvidence ev;
        ev.tx_id = tx_id;
        ev.source = EvidenceSource::NodeObservation;
        ev.observed_at = at;
        add_evidence(tx_id, ev);
    }

    auto& pool = mempool_[ci];
    if (std::find(pool.begin(), pool.end(), tx_id) == pool.end())
        pool.push_back(tx_id);

    // First confirmer to see the transaction kicks off the chained spends.
    if (variant_uses_confirmers(setup_.variant) && !confirmer_nodes_.empty() &&
        std::find(confirmer_nodes_.begin(), confirmer_nodes_.end(), node) !=
            confirmer_nodes_.end()) {
        if (!tx_confirm_started_.count(tx_id)) {
            tx_confirm_started_.insert(tx_id);
            std::vector<ConfirmerPeer> peers;
            for (NodeId n : confirmer_nodes_)
                peers.push_back(ConfirmerPeer{n, true, 0});
            auto chain = confirm_transaction(tx, setup_.confirmer_depth, setup_.confirmer_fee,
                                             peers, at);
            for (const auto& hop : chain.hops) {
                Hash256 id = tx_id;
                double hop_at = hop.at;
                q_.schedule(std::max(hop_at, q_.now()), EventKind::ConfirmerAction,
                            [this, id, hop_at] {
                                TimestampEvidence ev;
                                ev.tx_id = id;
                                ev.source = EvidenceSource::ConfirmerSpend;
                                ev.observed_at = hop_at;
                                add_evidence(id, ev);
                            });
            }
        }
    }

    if (variant_uses_rpca(setup_.variant) && !rpca_ran_) {
        // A visible conflict triggers one voting pass a few seconds later.
        for (const auto& in : tx.inputs) {
            auto sp = spenders_.find(in.source);
            if (sp != spenders_.end() && sp->second.size() > 1) {
                rpca_ran_ = true;
                q_.schedule(q_.now() + 4.0, EventKind::ConfirmerAction,
                            [this, ci] { run_rpca_vote(ci); });
                break;
            }
        }
    }
}

void Engine::run_rpca_vote(int ci) {
    std::vector<Transaction> candidates;
    for (const auto& id : mempool_[ci]) {
        auto it = tx_registry_.find(id);
        if (it != tx_registry_.end())
            candidates.push_back(it->second);
    }
    if (candidates.empty())
        return;
    std::vector<UNLNode> nodes;
    for (NodeId n : honest_nodes_) {
        UNLNode un;
        un.id = n;
        for (NodeId o : honest_nodes_)
            un.unique_node_list.insert(o);
        std::vector<std::pair<double, Hash256>> seen;
        for (const auto& c : candidates) {
            auto fs = c.first_seen.find(n);
            if (fs != c.first_seen.end() && fs->second <= q_.now())
                seen.emplace_back(fs->second, c.tx_id);
        }
        std::sort(seen.begin(), seen.end());
        for (auto& [t, id] : seen)
            un.seen.push_back(id);
        nodes.push_back(std::move(un));
    }
    auto closed = rpca_round(nodes, candidates);
    for (const auto& c : candidates)
        rpca_verdict_[c.tx_id] =
            std::find(closed.begin(), closed.end(), c.tx_id) != closed.end() ? 1 : -1;
}

bool Engine::tx_blocked_by_defense(const Transaction& tx) const {
    if (variant_uses_rpca(setup_.variant)) {
        auto v = rpca_verdict_.find(tx.tx_id);
        if (v != rpca_verdict_.end() && v->second < 0)
            return true;
    }
    if (!variant_uses_timestamps(setup_.variant))
        return false;
    for (const auto& in : tx.inputs) {
        auto sp = spenders_.find(in.source);
        if (sp == spenders_.end())
            continue;
        for (const auto& other_id : sp->second) {
            if (other_id == tx.tx_id)
                continue;
            auto oit = tx_registry_.find(other_id);
            if (oit == tx_registry_.end())
                continue;
            std::vector<TimestampEvidence> ev;
            auto e1 = evidence_.find(tx.tx_id);
            if (e1 != evidence_.end())
                ev.insert(ev.end(), e1->second.begin(), e1->second.end());
            auto e2 = evidence_.find(other_id);
            if (e2 != evidence_.end())
                ev.insert(ev.end(), e2->second.begin(), e2->second.end());
            try {
                auto res = adjudicate_pair(tx, oit->second, ev, setup_.adjudication_threshold);
                if (res.decision == Adjudication::RejectBoth || !(res.accepted == tx.tx_id))
                    return true;
            } catch (const NoEvidenceError&) {
                // Cannot judge yet; do not block.
            }
        }
    }
    return false;
}

bool Engine::block_ok_for_honest(const Block& b) const {
    for (const auto& tx : b.txs)
        if (tx_blocked_by_defense(tx))
            return false;
    return true;
}

std::vector<Transaction> Engine::select_txs(int ci, NodeId node, const Unit& u) {
    std::vector<Transaction> picked;
    auto mp = mempool_.find(ci);
    if (mp == mempool_.end() || mp->second.empty())
        return picked;
    const BlockTree& tree = coins_[ci].trees[node];

    // A transaction is dead on this node once a rival spend of any of its
    // inputs sits on the node's main chain.
    auto input_respent = [&](const Transaction& tx) {
        for (const auto& in : tx.inputs) {
            auto sp = spenders_.find(in.source);
            if (sp == spenders_.end())
                continue;
            for (const auto& other : sp->second)
                if (!(other == tx.tx_id) && tree.confirmations(other) > 0)
                    return true;
        }
        return false;
    };

    // Pending transactions this node has actually seen, oldest first.
    std::vector<const Transaction*> pending;
    for (const auto& id : mp->second) {
        auto it = tx_registry_.find(id);
        if (it == tx_registry_.end())
            continue;
        const Transaction& tx = it->second;
        if (!tx.first_seen.count(node))
            continue;
        if (tree.confirmations(tx.tx_id) > 0)
            continue;
        if (input_respent(tx))
            continue;
        pending.push_back(&tx);
    }
    if (pending.empty())
        return picked;
    std::stable_sort(pending.begin(), pending.end(), [&](const Transaction* a, const Transaction* b) {
        return a->first_seen.at(node) < b->first_seen.at(node);
    });

    std::vector<Transaction> pend_copy;
    for (auto* p : pending)
        pend_copy.push_back(*p);
    auto groups = detect_conflicts(pend_copy);
    std::map<Hash256, std::size_t> group_of;
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (const auto& id : groups[g])
            group_of[id] = g;

    std::set<std::size_t> handled_groups;
    for (const Transaction* tx : pending) {
        auto git = group_of.find(tx->tx_id);
        if (git == group_of.end()) {
            if (!tx_blocked_by_defense(*tx))
                picked.push_back(*tx);
            continue;
        }
        if (handled_groups.count(git->second))
            continue;
        handled_groups.insert(git->second);
        const auto& group = groups[git->second];

        // If any member is already confirmed the group is settled.
        bool settled = false;
        for (const auto& id : group)
            if (tree.confirmations(id) > 0)
                settled = true;
        if (settled)
            continue;

        const Transaction* winner = nullptr;
        if (variant_uses_rpca(setup_.variant)) {
            for (const auto& id : group) {
                auto v = rpca_verdict_.find(id);
                if (v != rpca_verdict_.end() && v->second > 0)
                    winner = &tx_registry_.at(id);
            }
        } else if (variant_uses_timestamps(setup_.variant)) {
            // Earliest pair governs. Adjudicate the two earliest-seen spends.
            std::vector<const Transaction*> members;
            for (const auto& id : group) {
                auto it = tx_registry_.find(id);
                if (it != tx_registry_.end())
                    members.push_back(&it->second);
            }
            if (members.size() >= 2) {
                std::vector<TimestampEvidence> ev;
                for (auto* m : members) {
                    auto e = evidence_.find(m->tx_id);
                    if (e != evidence_.end())
                        ev.insert(ev.end(), e->second.begin(), e->second.end());
                }
                try {
                    auto res = adjudicate_pair(*members[0], *members[1], ev,
                                               setup_.adjudication_threshold);
                    if (res.decision == Adjudication::AcceptFirst)
                        for (auto* m : members)
                            if (m->tx_id == res.accepted)
                                winner = m;
                } catch (const NoEvidenceError&) {
                    winner = nullptr; // defer
                }
            }
        } else {
            // Baseline: first seen wins, unless this miner takes bribes and a
            // bribed conflict pays better.
            winner = tx;
            if (u.accept_bribes) {
                for (const auto& id : group) {
                    auto b = bribes_.find(id);
                    if (b != bribes_.end() && b->second > 0)
                        winner = &tx_registry_.at(id);
                }
            }
        }
        if (winner)
            picked.push_back(*winner);
    }
    return picked;
}

void Engine::on_unit_found(std::size_t ui) {
    Unit& u = units_[ui];
    u.has_pending = false;
    if (u.off || u.coin.empty()) {
        return;
    }
    int ci = coin_of(u.coin);
    double now = q_.now();

    // Attack routing: the rented rig, or a hidden-fork pool's members while
    // the attack runs, extend the secret branch.
    int ai = -1;
    if (u.attack >= 0)
        ai = u.attack;
    else if (u.pool >= 0 && pools_[u.pool].attack >= 0) {
        const AttackRt& atk = attacks_[pools_[u.pool].attack];
        if (atk.phase == AttackRt::Phase::PreMine || atk.phase == AttackRt::Phase::Racing)
            ai = pools_[u.pool].attack;
    }
    if (ai >= 0 && (attacks_[ai].phase == AttackRt::Phase::PreMine ||
                    attacks_[ai].phase == AttackRt::Phase::Racing)) {
        AttackRt& atk = attacks_[ai];
        if (atk.setup.coin == u.coin) {
            if (atk.phase == AttackRt::Phase::PreMine) {
                // First secret block carries the replacement spend; only once
                // it exists is the victim transaction broadcast.
                atk.plan = make_double_spend_plan(atk.setup.coin, atk.setup.value,
                                                  1000 + static_cast<std::uint64_t>(ai),
                                                  2000 + static_cast<std::uint64_t>(ai), now,
                                                  atk.setup.z_wait,
                                                  atk.setup.attacker_hash);
                auto blk = make_block(ci, atk.fork_parent, atk.fork_parent_height + 1, u.actor, now,
                                      {atk.plan.replacement_tx});
                atk.secret.push_back(blk);
                atk.secret_work += blk->work;
                atk.victim_broadcast = true;
                atk.phase = AttackRt::Phase::Racing;
                {
                    auto [it, fresh] = tx_registry_.emplace(atk.plan.replacement_tx.tx_id,
                                                            atk.plan.replacement_tx);
                    if (fresh)
                        for (const auto& in : atk.plan.replacement_tx.inputs)
                            spenders_[in.source].push_back(atk.plan.replacement_tx.tx_id);
                }
                if (atk.setup.bribe > 0)
                    bribes_[atk.plan.replacement_tx.tx_id] = atk.setup.bribe;
                broadcast_tx(atk.attacker_node, ci, atk.plan.victim_tx, now);
            } else {
                const Hash256& parent = atk.secret.back()->id;
                auto blk = make_block(ci, parent, atk.secret.back()->height + 1, u.actor, now, {});
                atk.secret.push_back(blk);
                atk.secret_work += blk->work;
                // Once the branch is out in the open the attacker keeps
                // extending it publicly until it wins or the clock runs out.
                if (atk.published)
                    broadcast_block(atk.attacker_node, ci, blk);
            }
            // Rental spend so far; aborting beats running out of money.
            if (atk.setup.budget > 0 && atk.rental_rate_cost > 0) {
                double spent = atk.rental_rate_cost * (now - atk.rental_started);
                if (spent >= atk.setup.budget) {
                    finish_attack(ai, false, true, false);
                    return;
                }
            }
            maybe_publish(ai);
            schedule_unit(ui);
            return;
        }
    }

    // Honest find (or pool member under an honest/cartel/redirect manager).
    NodeId view = u.node;
    ActorId credited = u.actor;
    int target_ci = ci;
    if (u.pool >= 0) {
        const PoolRt& pool = pools_[u.pool];
        if (pool.actor.manager_strategy == ManagerStrategy::CrossCoinRedirect) {
            target_ci = coin_of(pool.redirect_coin);
            credited = pool.actor.id; // manager pockets the redirected block
        }
    }
    const BlockTree& tree = coins_[target_ci].trees[view];
    std::vector<Transaction> txs = select_txs(target_ci, view, u);
    auto blk = make_block(target_ci, tree.main_tip(), tree.main_height() + 1, credited, now,
                          std::move(txs));
    broadcast_block(view, target_ci, blk);

    // Merged mining: the parent solve may satisfy the child's target too.
    for (std::size_t k = 0; k < coins_.size(); ++k) {
        if (coins_[k].parent_coin != target_ci)
            continue;
        const CoinRt& child = coins_[k];
        const BlockTree& ctree = child.trees[view];
        std::int64_t ch = ctree.main_height() + 1;
        auto aux = apply_aux_pow(*blk, child.spec, child.diff, ch, ctree.main_tip(),
                                 reward_at(child.spec, ch));
        if (!aux && blk->work < child.diff.expected_hashes_per_block) {
            // Parent target is easier than the child's: a parent solve only
            // sometimes clears the child target.
            double pr = blk->work / child.diff.expected_hashes_per_block;
            if (u.stream->bernoulli(pr)) {
                Block cb;
                cb.coin = child.spec.label;
                cb.prev = ctree.main_tip();
                cb.height = ch;
                cb.miner = credited;
                cb.timestamp = now;
                cb.reward = reward_at(child.spec, ch);
                cb.work = child.diff.expected_hashes_per_block;
                cb.merkle = blk->id;
                cb.id = cb.compute_id();
                aux = cb;
            }
        }
        if (aux)
            broadcast_block(view, static_cast<int>(k), std::make_shared<const Block>(*aux));
        break;
    }

    schedule_unit(ui);
}

void Engine::on_child_found(std::size_t ui) {
    Unit& u = units_[ui];
    u.has_child_pending = false;
    if (u.off || u.coin.empty())
        return;
    int ci = coin_of(u.coin);
    for (std::size_t k = 0; k < coins_.size(); ++k) {
        if (coins_[k].parent_coin != ci)
            continue;
        const BlockTree& ctree = coins_[k].trees[u.node];
        auto blk = make_block(static_cast<int>(k), ctree.main_tip(), ctree.main_height() + 1,
                              u.actor, q_.now(), {});
        broadcast_block(u.node, static_cast<int>(k), blk);
        break;
    }
    // Re-arm only the residual clock; the parent clock is still pending.
    int pci = ci;
    for (std::size_t k = 0; k < coins_.size(); ++k) {
        if (coins_[k].parent_coin != pci)
            continue;
        double pd = coins_[pci].diff.expected_hashes_per_block;
        double cd = coins_[k].diff.expected_hashes_per_block;
        if (cd < pd) {
            double residual = u.hash_rate / cd - u.hash_rate / pd;
            if (residual > 0) {
                double cdelay = u.stream->exponential(residual);
                u.child_pending = q_.schedule(q_.now() + cdelay, EventKind::BlockFound,
                                              [this, ui] { on_child_found(ui); });
                u.has_child_pending = true;
            }
        }
        break;
    }
}

void Engine::on_arrival(NodeId node, int ci, BlockTree::BlockPtr block) {
    // Transactions travelling inside a block are observed here; for the
    // secret branch this is the first time the network sees the replacement.
    for (const auto& tx : block->txs) {
        auto [it, fresh] = tx_registry_.emplace(tx.tx_id, tx);
        if (fresh)
            for (const auto& in : tx.inputs)
                spenders_[in.source].push_back(tx.tx_id);
        if (!it->second.first_seen.count(node))
            on_tx_arrival(node, ci, tx.tx_id, q_.now());
    }

    BlockTree& tree = coins_[ci].trees[node];
    AcceptResult res = tree.accept_block(block, q_.now());

    if (node == observer_) {
        maybe_retarget(ci);
        for (std::size_t ai = 0; ai < attacks_.size(); ++ai)
            check_ship(ai);
        if (auto* rr = std::get_if<ReorgReport>(&res)) {
            for (std::size_t ai = 0; ai < attacks_.size(); ++ai) {
                AttackRt& atk = attacks_[ai];
                if (atk.phase != AttackRt::Phase::Racing || !atk.victim_broadcast)
                    continue;
                for (const auto& ds : rr->double_spent)
                    if (ds.victim_tx == atk.plan.victim_tx.tx_id)
                        finish_attack(ai, true, false, false);
            }
        }
    }

    // While pre-mining, the attacker re-bases onto whatever the public tip
    // becomes; the victim transaction is not yet committed anywhere.
    for (std::size_t ai = 0; ai < attacks_.size(); ++ai) {
        AttackRt& atk = attacks_[ai];
        if (node != atk.attacker_node || coin_of(atk.setup.coin) != ci)
            continue;
        if (atk.phase == AttackRt::Phase::PreMine) {
            const BlockTree& atree = coins_[ci].trees[atk.attacker_node];
            atk.fork_parent = atree.main_tip();
            atk.fork_parent_height = atree.main_height();
            atk.fork_parent_work = atree.main_work();
        }
    }
}

void Engine::check_ship(std::size_t ai) {
    AttackRt& atk = attacks_[ai];
    if (atk.phase != AttackRt::Phase::Racing || !atk.victim_broadcast)
        return;
    int ci = coin_of(atk.setup.coin);
    const BlockTree& obs = coins_[ci].trees[observer_];
    if (atk.bribe_mode) {
        // First confirmation of either spend decides the race.
        if (obs.confirmations(atk.plan.replacement_tx.tx_id) >= 1)
            finish_attack(ai, true, false, false);
        else if (obs.confirmations(atk.plan.victim_tx.tx_id) >= 1)
            finish_attack(ai, false, false, false);
        return;
    }
    if (atk.shipped)
        return;
    if (obs.confirmations(atk.plan.victim_tx.tx_id) >= atk.setup.z_wait) {
        atk.shipped = true;
        atk.outcome.ship_time = q_.now();
        maybe_publish(ai);
    }
}

void Engine::maybe_publish(std::size_t ai) {
    AttackRt& atk = attacks_[ai];
    if (atk.phase != AttackRt::Phase::Racing || !atk.shipped || atk.published)
        return;
    int ci = coin_of(atk.setup.coin);
    const BlockTree& aview = coins_[ci].trees[atk.attacker_node];
    double public_work = aview.main_work();
    double secret_total = atk.fork_parent_work + atk.secret_work;
    if (secret_total > public_work) {
        atk.published = true;
        atk.outcome.publish_time = q_.now();
        for (const auto& blk : atk.secret)
            broadcast_block(atk.attacker_node, ci, blk);
    }
}

void Engine::apply_displacement(std::size_t ai) {
    AttackRt& atk = attacks_[ai];
    if (!atk.setup.displace)
        return;
    const std::string& victim = atk.setup.coin;
    int vci = coin_of(victim);
    const std::string& family = coins_[vci].spec.hash_family;
    std::string refuge;
    for (const auto& rt : coins_)
        if (rt.spec.label != victim && rt.spec.hash_family == family)
            refuge = rt.spec.label;
    if (refuge.empty())
        return; // nothing to lure hash toward
    for (std::size_t ui = 0; ui < units_.size(); ++ui) {
        Unit& u = units_[ui];
        if (!u.migratory || u.off || u.coin != victim || u.attack >= 0)
            continue;
        atk.displaced.emplace_back(ui, u.coin);
        u.coin = refuge;
        schedule_unit(ui);
    }
}

void Engine::restore_displacement(std::size_t ai) {
    AttackRt& atk = attacks_[ai];
    for (auto& [ui, old_coin] : atk.displaced) {
        units_[ui].coin = old_coin;
        schedule_unit(ui);
    }
    atk.displaced.clear();
}

void Engine::on_attack_trigger(std::size_t ai) {
    AttackRt& atk = attacks_[ai];
    int ci = coin_of(atk.setup.coin);
    atk.start_time = q_.now();
    apply_displacement(ai);

    // Bribed inclusion: both spends go public, the conflict pays miners to
    // prefer the replacement, and the first one confirmed settles the race.
    if (atk.setup.type == AttackSetup::Type::DoubleSpend && atk.setup.attacker_hash <= 0 &&
        atk.setup.bribe > 0) {
        double now = q_.now();
        atk.plan = make_double_spend_plan(atk.setup.coin, atk.setup.value,
                                          1000 + static_cast<std::uint64_t>(ai),
                                          2000 + static_cast<std::uint64_t>(ai), now,
                                          atk.setup.z_wait, 0.0);
        atk.bribe_mode = true;
        atk.victim_broadcast = true;
        atk.phase = AttackRt::Phase::Racing;
        bribes_[atk.plan.replacement_tx.tx_id] = atk.setup.bribe;
        broadcast_tx(atk.attacker_node, ci, atk.plan.victim_tx, now);
        broadcast_tx(atk.attacker_node, ci, atk.plan.replacement_tx, now + 0.01);
        double deadline = atk.setup.deadline > 0
                              ? atk.setup.deadline
                              : 20.0 * static_cast<double>(atk.setup.z_wait) *
                                    coins_[ci].spec.block_time_target;
        q_.schedule(q_.now() + deadline, EventKind::AttackPhase,
                    [this, ai] { on_attack_deadline(ai); });
        return;
    }

    const BlockTree& aview = coins_[ci].trees[atk.attacker_node];
    atk.fork_parent = aview.main_tip();
    atk.fork_parent_height = aview.main_height();
    atk.fork_parent_work = aview.main_work();
    atk.phase = AttackRt::Phase::PreMine;
    atk.rental_started = q_.now();

    double attack_hash = atk.setup.attacker_hash;
    if (atk.setup.type == AttackSetup::Type::HiddenFork) {
        attack_hash = 0;
        for (std::size_t ui : pools_[atk.pool].member_units)
            attack_hash += units_[ui].hash_rate;
        atk.setup.attacker_hash = attack_hash;
        // Disclosing the previous block makes the diversion detectable; the
        // manager runs it anyway and the flag is recorded at the next push.
    } else {
        Unit& rig = units_[atk.unit];
        rig.off = false;
        schedule_unit(static_cast<std::size_t>(atk.unit));
    }

    // Competitive rental pricing: block value times (1 + premium), prorated
    // by the rented rig's expected block rate.
    double rented = attack_hash * atk.setup.rented_fraction;
    if (rented > 0) {
        const CoinRt& rt = coins_[ci];
        double price = rt.price.price_at(q_.now());
        double block_value =
            to_coins(reward_at(rt.spec, aview.main_height() + 1)) * price;
        double blocks_per_sec = rented / rt.diff.expected_hashes_per_block;
        atk.rental_rate_cost = block_value * (1.0 + atk.setup.premium) * blocks_per_sec;
    }

    double deadline = atk.setup.deadline > 0
                          ? atk.setup.deadline
                          : 20.0 * static_cast<double>(atk.setup.z_wait) *
                                coins_[ci].spec.block_time_target;
    q_.schedule(q_.now() + deadline, EventKind::AttackPhase, [this, ai] { on_attack_deadline(ai); });
}

void Engine::on_attack_deadline(std::size_t ai) {
    AttackRt& atk = attacks_[ai];
    if (atk.phase == AttackRt::Phase::PreMine || atk.phase == AttackRt::Phase::Racing)
        finish_attack(ai, false, false, true);
}

void Engine::finish_attack(std::size_t ai, bool success, bool budget_abort, bool deadline_abort) {
    AttackRt& atk = attacks_[ai];
    if (atk.phase == AttackRt::Phase::Done)
        return;
    atk.phase = AttackRt::Phase::Done;
    int ci = coin_of(atk.setup.coin);
    const CoinRt& rt = coins_[ci];
    double price = rt.price.price_at(q_.now());

    AttackOutcome& out = atk.outcome;
    out.success = success;
    out.aborted_budget = budget_abort;
    out.aborted_deadline = deadline_abort;
    out.blocks_mined_secret = static_cast<std::int64_t>(atk.secret.size());
    out.elapsed = q_.now() - atk.start_time;
    out.spent = atk.rental_rate_cost * (q_.now() - atk.rental_started);
    if (atk.setup.budget > 0 && out.spent > atk.setup.budget)
        out.spent = atk.setup.budget;
    if (success) {
        Amount secret_rewards = 0;
        for (const auto& b : atk.secret)
            secret_rewards += b->reward;
        out.revenue = to_coins(atk.setup.value) * price + to_coins(secret_rewards) * price;
    } else {
        out.revenue = 0.0;
    }
    out.net = out.revenue - out.spent;

    if (atk.unit >= 0) {
        Unit& rig = units_[atk.unit];
        rig.off = true;
        if (rig.has_pending) {
            q_.cancel(rig.pending);
            rig.has_pending = false;
        }
    }
    restore_displacement(ai);
    outcomes_.push_back(out);
    ++attacks_done_;
}

void Engine::maybe_retarget(int ci) {
    CoinRt& rt = coins_[ci];
    const BlockTree& obs = rt.trees[observer_];
    std::int64_t interval = rt.diff.retarget_interval_blocks;
    std::int64_t h = obs.main_height();
    std::int64_t boundary = (h / interval) * interval;
    if (boundary <= rt.last_retarget || boundary < interval)
        return;
    const Block* hi = obs.main_block_at(boundary);
    const Block* lo = obs.main_block_at(boundary - interval);
    if (!hi || !lo)
        return;
    double elapsed = hi->timestamp - lo->timestamp;
    rt.diff = retarget(rt.diff, elapsed);
    rt.last_retarget = boundary;
    reschedule_all_units_on(rt.spec.label);
}

void Engine::on_market_tick() {
    std::map<std::string, CoinMarketState> states;
    for (auto& rt : coins_) {
        double hash = total_hash_on(rt.spec.label);
        if (hash <= 0)
            continue;
        CoinMarketState st;
        st.total_hash_rate = hash;
        st.price = rt.price.price_at(q_.now());
        st.next_reward = reward_at(rt.spec, rt.trees[observer_].main_height() + 1);
        // Steady-state income signal: difficulty chases the hash rate, so the
        // market compares coins at their target block times.
        st.block_time_actual = rt.spec.block_time_target;
        states.emplace(rt.spec.label, st);
    }
    std::vector<MinerActor> econ;
    std::vector<std::size_t> econ_units;
    for (std::size_t ui = 0; ui < units_.size(); ++ui) {
        const Unit& u = units_[ui];
        if (!u.migratory || u.pool >= 0 || u.attack >= 0)
            continue;
        MinerActor m;
        m.id = static_cast<ActorId>(econ.size());
        m.name = u.name;
        m.hash_rate = u.hash_rate;
        m.electricity_cost = u.electricity;
        m.coin_assignment = u.off ? "" : u.coin;
        m.migratory = true;
        econ.push_back(m);
        econ_units.push_back(ui);
    }
    if (!econ.empty() && !states.empty()) {
        auto deltas = migrate(setup_.market.market, econ, states, market_stream_);
        for (const auto& d : deltas) {
            Unit& u = units_[econ_units[d.miner]];
            if (d.to.empty()) {
                u.off = true;
                if (u.has_pending) {
                    q_.cancel(u.pending);
                    u.has_pending = false;
                }
            } else {
                u.off = false;
                u.coin = d.to;
                schedule_unit(econ_units[d.miner]);
            }
        }
    }
    q_.schedule(q_.now() + setup_.market.market.tick_interval, EventKind::MarketTick,
                [this] { on_market_tick(); });
}

void Engine::on_metrics_sample() {
    for (std::size_t ci = 0; ci < coins_.size(); ++ci) {
        CoinRt& rt = coins_[ci];
        const BlockTree& obs = rt.trees[observer_];
        MetricsRow row;
        row.time_s = q_.now();
        row.hash_rate = total_hash_on(rt.spec.label);
        row.difficulty = rt.diff.expected_hashes_per_block;
        row.height = obs.main_height();
        auto fs = obs.fork_statistics();
        std::int64_t dt = fs.total_blocks - rt.prev_total;
        std::int64_t ds = fs.stale_blocks - rt.prev_stale;
        row.fork_rate_window = dt > 0 ? static_cast<double>(ds) / static_cast<double>(dt) : 0.0;
        rt.prev_total = fs.total_blocks;
        rt.prev_stale = fs.stale_blocks;
        row.price = rt.price.price_at(q_.now());
        double profit_sum = 0.0;
        int profit_n = 0;
        if (row.hash_rate > 0) {
            CoinMarketState st;
            st.total_hash_rate = row.hash_rate;
            st.price = row.price;
            st.next_reward = reward_at(rt.spec, obs.main_height() + 1);
            st.block_time_actual = rt.spec.block_time_target;
            for (const auto& u : units_) {
                if (u.off || u.coin != rt.spec.label)
                    continue;
                MinerActor m;
                m.hash_rate = u.hash_rate;
                m.electricity_cost = u.electricity;
                profit_sum += profitability(m, st);
                ++profit_n;
            }
        }
        row.profitability_mean = profit_n > 0 ? profit_sum / profit_n : 0.0;
        rt.series.push_back(row);
    }
    q_.schedule(q_.now() + setup_.metrics_interval, EventKind::MarketTick,
                [this] { on_metrics_sample(); });
}

void Engine::record_work_trace(std::size_t pi, const WorkItem& item) {
    const PoolRt& pool = pools_[pi];
    std::ostringstream line;
    line << "work t=" << q_.now() << " h0=" << to_hex(item.h0);
    line << " prev=" << (item.prev_id_disclosed ? to_hex(*item.prev_id_disclosed) : "-");
    line << " coin=" << (item.coin_disclosed ? *item.coin_disclosed : "-");
    line << " zeros=" << item.target_zeros;
    for (std::size_t ui : pool.member_units)
        traces_[units_[ui].name].push_back(line.str());
}

void Engine::on_work_push(std::size_t pi) {
    PoolRt& pool = pools_[pi];
    int ci = coin_of(pool.actor.coin);

    BlockTemplate tmpl;
    tmpl.coin = pool.actor.coin;
    tmpl.parent = coins_[ci].trees[pool.node].main_tip();
    if (pool.attack >= 0) {
        const AttackRt& atk = attacks_[pool.attack];
        if (atk.phase == AttackRt::Phase::Racing && !atk.secret.empty())
            tmpl.parent = atk.secret.back()->id;
        else if (atk.phase == AttackRt::Phase::PreMine)
            tmpl.parent = atk.fork_parent;
    } else if (pool.actor.manager_strategy == ManagerStrategy::CrossCoinRedirect) {
        int rci = coin_of(pool.redirect_coin);
        tmpl.coin = pool.redirect_coin;
        tmpl.parent = coins_[rci].trees[pool.node].main_tip();
    }

    // Plaintext-aware mining cannot hand out work without the previous block
    // id, so the variant forces full disclosure.
    PoolActor actor_view = pool.actor;
    if (variant_plaintext_aware(setup_.variant))
        actor_view.work_protocol = WorkProtocol::StratumLike;

    int tci = coin_of(tmpl.coin);
    WorkItem item = issue_work(actor_view, tmpl, coins_[tci].diff.target_zeros(), *pool.work_stream);
    if (setup_.record_traces)
        record_work_trace(pi, item);

    // Members with a full view compare the disclosed parent to recent tips.
    if (item.prev_id_disclosed) {
        const BlockTree& view = coins_[ci].trees[pool.node];
        std::vector<Hash256> recent;
        auto chain = view.main_chain();
        for (std::size_t k = chain.size() > 6 ? chain.size() - 6 : 0; k < chain.size(); ++k)
            recent.push_back(chain[k]);
        auto check = detect_redirect(item, view.main_tip(), recent);
        if (check == RedirectCheck::Redirected) {
            ++redirect_detections_;
            if (pool.attack >= 0)
                attacks_[pool.attack].outcome.detected = true;
        }
    }

    q_.schedule(q_.now() + setup_.work_cadence, EventKind::ConfirmerAction,
                [this, pi] { on_work_push(pi); });
}

void Engine::generate_share_window(std::size_t ui, double t0) {
    Unit& u = units_[ui];
    if (!u.off && !u.coin.empty()) {
        int ci = coin_of(u.coin);
        std::int32_t threshold = setup_.share_evidence_zeros;
        double target = coins_[ci].diff.target_zeros();
        if (static_cast<double>(threshold) <= target) {
            auto shares = generate_shares(u.actor, u.hash_rate, t0, setup_.work_cadence,
                                          coins_[ci].diff, threshold, *u.stream);
            for (const auto& s : shares) {
                if (setup_.record_traces) {
                    std::ostringstream line;
                    line << "share t=" << s.found_at << " zeros=" << s.zeros << " ack";
                    traces_[u.name].push_back(line.str());
                }
                if (variant_uses_shares(setup_.variant)) {
                    for (const auto& [txid, tx] : tx_registry_) {
                        auto fs = tx.first_seen.find(u.node);
                        if (fs == tx.first_seen.end() || fs->second > s.found_at)
                            continue;
                        if (auto ev = share_evidence(s, txid, setup_.share_evidence_zeros))
                            add_evidence(txid, *ev);
                    }
                }
            }
        }
    }
    double next = t0 + setup_.work_cadence;
    q_.schedule(next + setup_.work_cadence, EventKind::ConfirmerAction,
                [this, ui, next] { generate_share_window(ui, next); });
}

std::int64_t Engine::evidence_count(const Hash256& tx_id, EvidenceSource source) const {
    auto it = evidence_.find(tx_id);
    if (it == evidence_.end())
        return 0;
    std::int64_t n = 0;
    for (const auto& ev : it->second)
        n += ev.source == source ? 1 : 0;
    return n;
}

double Engine::acceptance_time(const std::string& coin, const Hash256& tx_id) const {
    int ci = coin_of(coin);
    if (variant_uses_timestamps(setup_.variant)) {
        auto ev = evidence_.find(tx_id);
        if (ev != evidence_.end() && !ev->second.empty()) {
            double earliest = ev->second.front().observed_at;
            for (const auto& e : ev->second)
                earliest = std::min(earliest, e.observed_at);
            return earliest + setup_.adjudication_threshold;
        }
    }
    const BlockTree& obs = coins_[ci].trees[observer_];
    std::int64_t conf = obs.confirmations(tx_id);
    if (conf <= 0)
        return -1.0;
    const Block* b = obs.main_block_at(obs.main_height() - conf + 1);
    return b ? b->timestamp : -1.0;
}

double Engine::total_hash_on(const std::string& coin) const {
    double h = 0;
    for (const auto& u : units_)
        if (!u.off && u.coin == coin)
            h += u.hash_rate;
    return h;
}

const BlockTree& Engine::observer_tree(const std::string& coin) const {
    return coins_[coin_of(coin)].trees[observer_];
}

const BlockTree& Engine::node_tree(const std::string& coin, NodeId node) const {
    return coins_[coin_of(coin)].trees.at(node);
}

bool Engine::honest_nodes_contain(const std::string& coin, const Hash256& id) const {
    int ci = coin_of(coin);
    for (NodeId n : honest_nodes_)
        if (coins_[ci].trees[n].contains(id))
            return true;
    return false;
}

std::vector<CoinRunStats> Engine::coin_stats() const {
    std::vector<CoinRunStats> out;
    for (const auto& rt : coins_) {
        CoinRunStats st;
        st.label = rt.spec.label;
        const BlockTree& obs = rt.trees[observer_];
        st.final_height = obs.main_height();
        st.minted_supply = obs.minted_supply();
        st.schedule_supply = 0;
        for (std::int64_t h = 0; h <= st.final_height; ++h)
            st.schedule_supply += reward_at(rt.spec, h);
        st.forks = obs.fork_statistics();
        st.series = rt.series;
        for (const auto& id : obs.main_chain()) {
            const Block* b = obs.find(id);
            if (b && b->miner != kNoActor)
                ++st.blocks_by_miner[b->miner];
        }
        out.push_back(std::move(st));
    }
    return out;
}

} // namespace chainlab
