#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "chainlab/defenses.hpp"
#include "chainlab/rng.hpp"

using namespace chainlab;

namespace {

Signature sig_n(std::uint64_t n) {
    Signature s;
    s.r = U256::from_u64(2 * n + 1);
    s.s = U256::from_u64(3 * n + 1);
    s.key_id = n;
    return s;
}

OutputRef out_n(std::uint64_t n) {
    OutputRef r;
    r.tx_id = sha256("o" + std::to_string(n));
    return r;
}

Transaction tx_spending(std::uint64_t out, std::uint64_t key, double created = 0.0) {
    return make_transaction({{out_n(out), sig_n(key)}}, {{key, coins(1.0)}}, 0, created);
}

TimestampEvidence obs(const Hash256& id, double at) {
    TimestampEvidence ev;
    ev.tx_id = id;
    ev.source = EvidenceSource::NodeObservation;
    ev.observed_at = at;
    return ev;
}

U256 random_mod_q(RngStream& rng) {
    for (;;) {
        U256 v = U256::from_limbs(rng.next_u64(), rng.next_u64(), rng.next_u64(), rng.next_u64());
        if (!v.is_zero() && v < kGroupOrder)
            return v;
    }
}

} // namespace

TEST_SUITE("defenses") {

TEST_CASE("signature normalization") {
    U256 r = U256::from_u64(12345);
    U256 low = U256::from_u64(777);
    auto n1 = normalize_signature(r, low);
    CHECK(n1.s == low); // already canonical

    U256 high = kGroupOrder - low;
    auto n2 = normalize_signature(r, high);
    CHECK(n2.s == low); // (r, -s) folds back

    CHECK_THROWS_AS(normalize_signature(U256{}, low), OutOfRangeError);
    CHECK_THROWS_AS(normalize_signature(r, kGroupOrder), OutOfRangeError);

    RngStream rng(31, "sig-prop");
    for (int i = 0; i < 200; ++i) {
        U256 rr = random_mod_q(rng), ss = random_mod_q(rng);
        auto once = normalize_signature(rr, ss);
        auto twice = normalize_signature(once.r, once.s);
        CHECK(once == twice); // idempotent
        CHECK(once.s <= kGroupOrderHalf);
    }
}

TEST_CASE("20 second adjudication") {
    Transaction t1 = tx_spending(1, 10, 100.0);
    Transaction t2 = tx_spending(1, 11, 100.0);

    SUBCASE("clear gap accepts the first") {
        auto res = adjudicate_pair(t1, t2, {obs(t1.tx_id, 100.0), obs(t2.tx_id, 130.0)});
        CHECK(res.decision == Adjudication::AcceptFirst);
        CHECK(res.accepted == t1.tx_id);
    }
    SUBCASE("near-simultaneous spends reject both") {
        auto res = adjudicate_pair(t1, t2, {obs(t1.tx_id, 100.0), obs(t2.tx_id, 115.0)});
        CHECK(res.decision == Adjudication::RejectBoth);
    }
    SUBCASE("exactly at the threshold rejects both") {
        auto res = adjudicate_pair(t1, t2, {obs(t1.tx_id, 100.0), obs(t2.tx_id, 120.0)});
        CHECK(res.decision == Adjudication::RejectBoth);
    }
    SUBCASE("order does not matter, the earlier one wins") {
        auto res = adjudicate_pair(t2, t1, {obs(t1.tx_id, 100.0), obs(t2.tx_id, 180.0)});
        CHECK(res.decision == Adjudication::AcceptFirst);
        CHECK(res.accepted == t1.tx_id);
    }
    SUBCASE("no evidence defers") {
        CHECK_THROWS_AS(adjudicate_pair(t1, t2, {}), NoEvidenceError);
    }
    SUBCASE("accept-any-one policy resolves the simultaneous case instead") {
        std::vector<TimestampEvidence> ev{obs(t1.tx_id, 100.0), obs(t2.tx_id, 115.0)};
        auto res = adjudicate_pair(t1, t2, ev, 20.0, 60.0, SimultaneousPolicy::AcceptAnyOne);
        CHECK(res.decision == Adjudication::AcceptFirst);
        CHECK(res.accepted == t1.tx_id);
        // Deterministic even on a dead tie.
        std::vector<TimestampEvidence> tie{obs(t1.tx_id, 100.0), obs(t2.tx_id, 100.0)};
        auto r1 = adjudicate_pair(t1, t2, tie, 20.0, 60.0, SimultaneousPolicy::AcceptAnyOne);
        auto r2 = adjudicate_pair(t2, t1, tie, 20.0, 60.0, SimultaneousPolicy::AcceptAnyOne);
        CHECK(r1.decision == Adjudication::AcceptFirst);
        CHECK(r1.accepted == r2.accepted);
    }
    SUBCASE("earliest credible evidence governs, multiple sources") {
        std::vector<TimestampEvidence> ev{obs(t1.tx_id, 140.0), obs(t1.tx_id, 101.0),
                                          obs(t2.tx_id, 150.0)};
        auto res = adjudicate_pair(t1, t2, ev);
        CHECK(res.decision == Adjudication::AcceptFirst);
        CHECK(res.t1 == 101.0);
    }
    SUBCASE("bribed timestamps earlier than physics are discarded") {
        // t2 claims an observation long before it could have propagated.
        std::vector<TimestampEvidence> ev{obs(t1.tx_id, 101.0), obs(t2.tx_id, 5.0),
                                          obs(t2.tx_id, 150.0)};
        auto res = adjudicate_pair(t1, t2, ev, 20.0, 60.0);
        CHECK(res.decision == Adjudication::AcceptFirst);
        CHECK(res.accepted == t1.tx_id);
        CHECK(res.t2 == 150.0);
    }
}

TEST_CASE("adjudication determinism: same evidence, same result") {
    Transaction t1 = tx_spending(2, 20, 50.0);
    Transaction t2 = tx_spending(2, 21, 50.0);
    std::vector<TimestampEvidence> ev{obs(t1.tx_id, 50.0), obs(t2.tx_id, 90.0)};
    auto a = adjudicate_pair(t1, t2, ev);
    for (int i = 0; i < 10; ++i) {
        auto b = adjudicate_pair(t1, t2, ev);
        CHECK(a.decision == b.decision);
        CHECK(a.accepted == b.accepted);
    }
}

TEST_CASE("confirmer chains: base case, conservation, determinism") {
    Transaction tx = tx_spending(3, 30, 10.0);
    std::vector<ConfirmerPeer> peers;
    for (NodeId n = 0; n < 12; ++n)
        peers.push_back({n, true, 0});

    SUBCASE("K=1: two peers each keep the fee, no forwarding") {
        auto chain = confirm_transaction(tx, 1, coins(0.001), peers, 10.0);
        CHECK(chain.hops.size() == 2);
        CHECK(chain.total_paid == 2 * coins(0.001));
        for (const auto& hop : chain.hops) {
            CHECK(hop.depth == 1);
            CHECK(hop.received == coins(0.001));
            CHECK(hop.kept == coins(0.001));
            CHECK(hop.forwarded == 0);
        }
        CHECK(!chain.peers_reused);
    }
    SUBCASE("K=3: every hop keeps exactly C_f and the tree pays out 2*K*C_f") {
        Amount cf = coins(1.0);
        auto chain = confirm_transaction(tx, 3, cf, peers, 10.0);
        CHECK(chain.hops.size() == 6); // two peers per level
        Amount kept = 0;
        for (const auto& hop : chain.hops) {
            CHECK(hop.kept == cf);
            CHECK(hop.received == (3 - hop.depth + 1) * cf);
            CHECK(hop.forwarded == hop.received - cf);
            kept += hop.kept;
        }
        CHECK(kept == chain.total_paid);
        CHECK(chain.total_paid == 6 * cf);
        // Spends land promptly, well within a block time.
        for (const auto& hop : chain.hops)
            CHECK(hop.at <= 10.0 + 2.0);
    }
    SUBCASE("selection is deterministic in (tx, list)") {
        auto c1 = confirm_transaction(tx, 3, coins(0.001), peers, 10.0);
        auto c2 = confirm_transaction(tx, 3, coins(0.001), peers, 10.0);
        REQUIRE(c1.hops.size() == c2.hops.size());
        for (std::size_t i = 0; i < c1.hops.size(); ++i)
            CHECK(c1.hops[i].peer == c2.hops[i].peer);
        Transaction other = tx_spending(4, 31, 10.0);
        auto c3 = confirm_transaction(other, 3, coins(0.001), peers, 10.0);
        bool all_same = true;
        for (std::size_t i = 0; i < c1.hops.size(); ++i)
            all_same = all_same && c1.hops[i].peer == c3.hops[i].peer;
        CHECK(!all_same);
    }
    SUBCASE("a short confirmer list is reused and flagged") {
        std::vector<ConfirmerPeer> two{{0, true, 0}, {1, true, 0}};
        auto chain = confirm_transaction(tx, 3, coins(0.001), two, 10.0);
        CHECK(chain.peers_reused);
        CHECK(chain.hops.size() == 6);
    }
    SUBCASE("inactive peers are never selected") {
        std::vector<ConfirmerPeer> mixed;
        for (NodeId n = 0; n < 12; ++n)
            mixed.push_back({n, n < 4, 0}); // only 0..3 active
        auto chain = confirm_transaction(tx, 2, coins(0.001), mixed, 10.0);
        for (const auto& hop : chain.hops)
            CHECK(hop.peer < 4);
    }
}

TEST_CASE("share evidence weights") {
    Share s;
    s.zeros = 48;
    s.found_at = 77.0;
    auto ev = share_evidence(s, sha256("tx"), 48);
    REQUIRE(ev.has_value());
    CHECK(ev->weight == 1.0);
    CHECK(ev->observed_at == 77.0);
    CHECK(ev->source == EvidenceSource::MinerShare);

    s.zeros = 50;
    CHECK(share_evidence(s, sha256("tx"), 48)->weight == 4.0);

    s.zeros = 42;
    CHECK(!share_evidence(s, sha256("tx"), 48).has_value());
}

TEST_CASE("plaintext aware hashing") {
    std::string header = "block header bytes";
    SUBCASE("all-zero previous id reduces to double hashing") {
        Hash256 zero{};
        CHECK(plaintext_aware_hash(header, zero) ==
              sha256(sha256(header).data(), 32));
    }
    SUBCASE("avalanche: flipping one bit of prev changes about half the output") {
        RngStream rng(41, "pa");
        std::int64_t total_flips = 0;
        const int trials = 1000;
        for (int t = 0; t < trials; ++t) {
            Hash256 prev;
            for (auto& byte : prev)
                byte = static_cast<std::uint8_t>(rng.next_u64());
            Hash256 flipped = prev;
            std::size_t bit = static_cast<std::size_t>(rng.uniform_below(256));
            flipped[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
            Hash256 a = plaintext_aware_hash(header, prev);
            Hash256 b = plaintext_aware_hash(header, flipped);
            for (int i = 0; i < 32; ++i)
                total_flips += __builtin_popcount(static_cast<unsigned>(a[i] ^ b[i]));
        }
        double avg = static_cast<double>(total_flips) / trials;
        CHECK(avg >= 100.0);
        CHECK(avg <= 156.0);
    }
}

namespace {

// Brute-force re-evaluation of the voting rounds, written independently of
// rpca_round: per node, per round, recompute every tally from scratch.
std::vector<std::vector<Hash256>> rpca_reference(const std::vector<UNLNode>& nodes,
                                                 const std::vector<Transaction>& candidates,
                                                 const std::vector<double>& thresholds) {
    auto groups = detect_conflicts(candidates);
    auto conflicting = [&](const Hash256& a, const Hash256& b) {
        for (const auto& g : groups) {
            bool ha = std::find(g.begin(), g.end(), a) != g.end();
            bool hb = std::find(g.begin(), g.end(), b) != g.end();
            if (ha && hb)
                return true;
        }
        return false;
    };
    std::map<NodeId, const UNLNode*> by_id;
    for (const auto& n : nodes)
        by_id[n.id] = &n;
    std::vector<std::vector<Hash256>> alive(nodes.size());
    for (auto& a : alive)
        for (const auto& c : candidates)
            a.push_back(c.tx_id);
    for (double th : thresholds) {
        std::vector<std::vector<Hash256>> next(nodes.size());
        for (std::size_t ni = 0; ni < nodes.size(); ++ni) {
            for (const auto& cand : alive[ni]) {
                int yes = 0, total = 0;
                for (NodeId peer_id : nodes[ni].unique_node_list) {
                    auto pit = by_id.find(peer_id);
                    if (pit == by_id.end())
                        continue;
                    std::size_t pi = 0;
                    for (std::size_t k = 0; k < nodes.size(); ++k)
                        if (nodes[k].id == peer_id)
                            pi = k;
                    const UNLNode& peer = *pit->second;
                    ++total;
                    auto pos = std::find(peer.seen.begin(), peer.seen.end(), cand);
                    if (pos == peer.seen.end())
                        continue;
                    bool blocked = false;
                    for (const auto& rival : alive[pi]) {
                        if (rival == cand || !conflicting(rival, cand))
                            continue;
                        auto rpos = std::find(peer.seen.begin(), peer.seen.end(), rival);
                        if (rpos != peer.seen.end() && rpos < pos)
                            blocked = true;
                    }
                    if (!blocked)
                        ++yes;
                }
                if (total > 0 && static_cast<double>(yes) / total >= th)
                    next[ni].push_back(cand);
            }
        }
        alive = next;
    }
    return alive;
}

} // namespace

TEST_CASE("rpca: single uncontested transaction closes") {
    Transaction tx = tx_spending(5, 50);
    std::vector<UNLNode> nodes;
    for (NodeId n = 0; n < 5; ++n) {
        UNLNode un;
        un.id = n;
        for (NodeId o = 0; o < 5; ++o)
            un.unique_node_list.insert(o);
        un.seen = {tx.tx_id};
        nodes.push_back(un);
    }
    auto closed = rpca_round(nodes, {tx});
    REQUIRE(closed.size() == 1);
    CHECK(closed[0] == tx.tx_id);
}

TEST_CASE("rpca: of a conflicting pair the majority's first transaction survives") {
    Transaction t1 = tx_spending(6, 60);
    Transaction t2 = tx_spending(6, 61);
    std::vector<UNLNode> nodes;
    for (NodeId n = 0; n < 10; ++n) {
        UNLNode un;
        un.id = n;
        for (NodeId o = 0; o < 10; ++o)
            un.unique_node_list.insert(o);
        un.seen = n < 9 ? std::vector<Hash256>{t1.tx_id, t2.tx_id}
                        : std::vector<Hash256>{t2.tx_id, t1.tx_id};
        nodes.push_back(un);
    }
    auto closed = rpca_round(nodes, {t1, t2});
    REQUIRE(closed.size() == 1);
    CHECK(closed[0] == t1.tx_id); // the second one fails

    // Every node's closed set agrees.
    for (const auto& n : nodes)
        CHECK(n.closed == closed);
}

TEST_CASE("rpca: a transaction seen by only half the nodes misses the 80% bar") {
    Transaction tx = tx_spending(7, 70);
    std::vector<UNLNode> nodes;
    for (NodeId n = 0; n < 10; ++n) {
        UNLNode un;
        un.id = n;
        for (NodeId o = 0; o < 10; ++o)
            un.unique_node_list.insert(o);
        if (n < 5)
            un.seen = {tx.tx_id};
        nodes.push_back(un);
    }
    auto closed = rpca_round(nodes, {tx});
    CHECK(closed.empty());
}

TEST_CASE("rpca consistency on randomized small instances vs reference evaluation") {
    RngStream rng(43, "rpca-prop");
    for (int trial = 0; trial < 40; ++trial) {
        int n_nodes = 4 + static_cast<int>(rng.uniform_below(17)); // up to 20
        Transaction t1 = tx_spending(100 + trial, 1);
        Transaction t2 = tx_spending(100 + trial, 2);
        Transaction t3 = tx_spending(500 + trial, 3);
        std::vector<Transaction> cands{t1, t2, t3};
        std::vector<UNLNode> nodes;
        for (int i = 0; i < n_nodes; ++i) {
            UNLNode un;
            un.id = static_cast<NodeId>(i);
            for (int o = 0; o < n_nodes; ++o)
                un.unique_node_list.insert(static_cast<NodeId>(o)); // full overlap
            std::vector<Hash256> seen;
            if (rng.bernoulli(0.85))
                seen.push_back(t1.tx_id);
            if (rng.bernoulli(0.3))
                seen.push_back(t2.tx_id);
            if (rng.bernoulli(0.9))
                seen.push_back(t3.tx_id);
            if (rng.bernoulli(0.5))
                std::reverse(seen.begin(), seen.end());
            un.seen = seen;
            nodes.push_back(un);
        }
        auto closed = rpca_round(nodes, cands);
        auto ref = rpca_reference(nodes, cands, {0.5, 0.6, 0.7, 0.8});
        REQUIRE(!ref.empty());
        CHECK(closed == ref[0]);
        // With full UNL overlap every node closes the same ledger, and the
        // reference agrees node by node.
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            CHECK(nodes[i].closed == closed);
            CHECK(ref[i] == closed);
        }
        // Never both sides of a conflict.
        bool has1 = std::find(closed.begin(), closed.end(), t1.tx_id) != closed.end();
        bool has2 = std::find(closed.begin(), closed.end(), t2.tx_id) != closed.end();
        CHECK(!(has1 && has2));
    }
}

TEST_CASE("variant names round-trip") {
    for (auto v : {DefenseVariant::Baseline, DefenseVariant::Timestamped20s,
                   DefenseVariant::Confirmers, DefenseVariant::Shares, DefenseVariant::Rpca,
                   DefenseVariant::PlaintextAware, DefenseVariant::All})
        CHECK(parse_defense_variant(defense_variant_name(v)) == v);
    CHECK(!parse_defense_variant("nope").has_value());
}

} // TEST_SUITE
