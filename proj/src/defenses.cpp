#include "chainlab/defenses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chainlab {

AdjudicationResult adjudicate_pair(const Transaction& tx1, const Transaction& tx2,
                                   const std::vector<TimestampEvidence>& evidence,
                                   double threshold_seconds, double max_network_latency,
                                   SimultaneousPolicy policy) {
    auto earliest = [&](const Transaction& tx) {
        double t = std::numeric_limits<double>::infinity();
        bool any = false;
        for (const auto& ev : evidence) {
            if (!(ev.tx_id == tx.tx_id))
                continue;
            // Evidence older than the claimed creation minus the worst-case
            // propagation cannot be genuine observation; treat as bribed.
            if (ev.observed_at < tx.created_at - max_network_latency)
                continue;
            any = true;
            t = std::min(t, ev.observed_at);
        }
        return std::pair{any, t};
    };
    auto [has1, t1] = earliest(tx1);
    auto [has2, t2] = earliest(tx2);
    if (!has1 && !has2)
        throw NoEvidenceError("adjudicate_pair: neither transaction has evidence yet");

    AdjudicationResult res;
    res.t1 = t1;
    res.t2 = t2;
    if (has1 != has2) {
        res.decision = Adjudication::AcceptFirst;
        res.accepted = has1 ? tx1.tx_id : tx2.tx_id;
        return res;
    }
    // Strictly greater gap required: at exactly the threshold the spends
    // count as simultaneous.
    if (std::abs(t2 - t1) > threshold_seconds) {
        res.decision = Adjudication::AcceptFirst;
        res.accepted = (t1 <= t2) ? tx1.tx_id : tx2.tx_id;
    } else if (policy == SimultaneousPolicy::AcceptAnyOne) {
        res.decision = Adjudication::AcceptFirst;
        if (t1 != t2)
            res.accepted = (t1 < t2) ? tx1.tx_id : tx2.tx_id;
        else // dead tie: any deterministic convention works
            res.accepted = (tx1.tx_id < tx2.tx_id) ? tx1.tx_id : tx2.tx_id;
    } else {
        res.decision = Adjudication::RejectBoth;
    }
    return res;
}

namespace {

std::vector<NodeId> pick_confirmers(const Hash256& tx_id, int level,
                                    const std::vector<ConfirmerPeer>& active,
                                    std::vector<bool>& used, bool& reused) {
    std::vector<NodeId> picked;
    for (int slot = 0; slot < 2; ++slot) {
        HashWriter w;
        w.str("confirmer").bytes(tx_id).u32(static_cast<std::uint32_t>(level)).u32(slot);
        for (const auto& p : active)
            w.u32(p.node);
        Hash256 h = w.digest();
        std::uint64_t v;
        std::memcpy(&v, h.data(), 8);
        std::size_t start = static_cast<std::size_t>(v % active.size());
        std::size_t i = start;
        bool found = false;
        do {
            if (!used[i]) {
                found = true;
                break;
            }
            i = (i + 1) % active.size();
        } while (i != start);
        if (!found) {
            // Everyone already serves this chain; wrap around and reuse.
            reused = true;
            std::fill(used.begin(), used.end(), false);
            i = start;
        }
        used[i] = true;
        picked.push_back(active[i].node);
    }
    return picked;
}

} // namespace

ConfirmationChain confirm_transaction(const Transaction& tx, int k, Amount c_f,
                                      const std::vector<ConfirmerPeer>& confirmer_list,
                                      double at) {
    if (k < 1)
        throw SimError("confirm_transaction: K must be >= 1");
    if (c_f <= 0)
        throw SimError("confirm_transaction: C_f must be positive");
    std::vector<ConfirmerPeer> active;
    for (const auto& p : confirmer_list)
        if (p.active_window)
            active.push_back(p);
    if (active.empty())
        throw SimError("confirm_transaction: no active confirmer peers");

    ConfirmationChain chain;
    chain.tx_id = tx.tx_id;
    chain.total_paid = 2 * static_cast<Amount>(k) * c_f;
    std::vector<bool> used(active.size(), false);
    if (active.size() < 2 * static_cast<std::size_t>(k))
        chain.peers_reused = true;

    // Level l: two peers, each receiving (K - l + 1) * C_f, keeping C_f and
    // forwarding the rest split across the next level, whose two peers merge
    // a half from each sender. Confirmation spends are immediate, so each
    // level lands a fraction of a second after the previous one.
    for (int level = 1; level <= k; ++level) {
        Amount received = static_cast<Amount>(k - level + 1) * c_f;
        bool reused = false;
        auto peers = pick_confirmers(tx.tx_id, level, active, used, reused);
        if (reused)
            chain.peers_reused = true;
        for (NodeId peer : peers) {
            ConfirmationHop hop;
            hop.peer = peer;
            hop.depth = level;
            hop.received = received;
            hop.kept = c_f;
            hop.forwarded = received - c_f;
            hop.at = at + 0.5 * level;
            chain.hops.push_back(hop);
        }
    }
    return chain;
}

std::vector<TimestampEvidence> ConfirmationChain::evidence(double) const {
    std::vector<TimestampEvidence> out;
    for (const auto& hop : hops) {
        TimestampEvidence ev;
        ev.tx_id = tx_id;
        ev.source = EvidenceSource::ConfirmerSpend;
        ev.observed_at = hop.at;
        ev.weight = 1.0;
        out.push_back(ev);
    }
    return out;
}

std::optional<TimestampEvidence> share_evidence(const Share& share, const Hash256& tx_id,
                                                std::int32_t min_zeros) {
    if (share.zeros < min_zeros)
        return std::nullopt;
    TimestampEvidence ev;
    ev.tx_id = tx_id;
    ev.source = EvidenceSource::MinerShare;
    ev.observed_at = share.found_at;
    ev.weight = std::pow(2.0, static_cast<double>(share.zeros - min_zeros));
    return ev;
}

std::vector<Hash256> rpca_round(std::vector<UNLNode>& nodes,
                                const std::vector<Transaction>& candidates,
                                const std::vector<double>& round_thresholds) {
    if (nodes.empty() || candidates.empty())
        return {};

    // Conflict groups over shared inputs.
    auto groups = detect_conflicts(candidates);
    std::unordered_map<Hash256, std::size_t, Hash256Hasher> conflict_group;
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (const auto& id : groups[g])
            conflict_group.emplace(id, g);

    // A node votes YES on a candidate it has seen, unless an earlier-seen
    // member of the same conflict group outranks it.
    auto votes_yes = [&](const UNLNode& n, const Hash256& cand,
                         const std::vector<Hash256>& alive) {
        auto pos = std::find(n.seen.begin(), n.seen.end(), cand);
        if (pos == n.seen.end())
            return false;
        auto git = conflict_group.find(cand);
        if (git == conflict_group.end())
            return true;
        for (const auto& other : groups[git->second]) {
            if (other == cand)
                continue;
            if (std::find(alive.begin(), alive.end(), other) == alive.end())
                continue;
            auto opos = std::find(n.seen.begin(), n.seen.end(), other);
            if (opos != n.seen.end() && opos < pos)
                return false;
        }
        return true;
    };

    std::unordered_map<NodeId, std::size_t> by_id;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        by_id.emplace(nodes[i].id, i);

    // Each node prunes its own candidate list against its own UNL tally; a
    // peer's vote depends on that peer's surviving set, so losing conflict
    // candidates free their rivals in later rounds.
    std::vector<std::vector<Hash256>> alive(nodes.size());
    for (auto& a : alive)
        for (const auto& c : candidates)
            a.push_back(c.tx_id);

    for (double th : round_thresholds) {
        std::vector<std::vector<Hash256>> next(nodes.size());
        for (std::size_t ni = 0; ni < nodes.size(); ++ni) {
            const UNLNode& n = nodes[ni];
            if (n.unique_node_list.empty())
                throw SimError("rpca_round: empty UNL");
            for (const auto& cand : alive[ni]) {
                std::size_t yes = 0, total = 0;
                for (NodeId peer : n.unique_node_list) {
                    auto it = by_id.find(peer);
                    if (it == by_id.end())
                        continue;
                    ++total;
                    if (votes_yes(nodes[it->second], cand, alive[it->second]))
                        ++yes;
                }
                if (total > 0 && static_cast<double>(yes) / static_cast<double>(total) >= th)
                    next[ni].push_back(cand);
            }
        }
        alive = std::move(next);
    }
    for (std::size_t ni = 0; ni < nodes.size(); ++ni)
        nodes[ni].closed = alive[ni];
    // The op reports the first node's closed ledger; consistency across nodes
    // is a property checked against the per-node sets left in `closed`.
    return alive.empty() ? std::vector<Hash256>{} : alive.front();
}

Hash256 plaintext_aware_hash(const std::vector<std::uint8_t>& header_bytes,
                             const Hash256& prev_block_id) {
    Hash256 inner = sha256(header_bytes.data(), header_bytes.size());
    Hash256 mixed = hash_xor(prev_block_id, inner);
    return sha256(mixed.data(), mixed.size());
}

Hash256 plaintext_aware_hash(std::string_view header, const Hash256& prev_block_id) {
    Hash256 inner = sha256(header);
    Hash256 mixed = hash_xor(prev_block_id, inner);
    return sha256(mixed.data(), mixed.size());
}

const char* defense_variant_name(DefenseVariant v) {
    switch (v) {
    case DefenseVariant::Baseline: return "baseline";
    case DefenseVariant::Timestamped20s: return "timestamped_20s";
    case DefenseVariant::Confirmers: return "confirmers";
    case DefenseVariant::Shares: return "shares";
    case DefenseVariant::Rpca: return "rpca";
    case DefenseVariant::PlaintextAware: return "plaintext_aware";
    case DefenseVariant::All: return "all";
    }
    return "?";
}

std::optional<DefenseVariant> parse_defense_variant(const std::string& name) {
    for (auto v : {DefenseVariant::Baseline, DefenseVariant::Timestamped20s,
                   DefenseVariant::Confirmers, DefenseVariant::Shares, DefenseVariant::Rpca,
                   DefenseVariant::PlaintextAware, DefenseVariant::All})
        if (name == defense_variant_name(v))
            return v;
    return std::nullopt;
}

} // namespace chainlab
