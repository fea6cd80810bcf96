#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <optional>
#include <string>
#include <vector>

#include "chainlab/attacks.hpp"
#include "chainlab/chain.hpp"
#include "chainlab/defenses.hpp"
#include "chainlab/econ.hpp"
#include "chainlab/event_queue.hpp"
#include "chainlab/mining.hpp"
#include "chainlab/network.hpp"

namespace chainlab {

struct CoinSetup {
    CoinSpec spec;
    double initial_hashes_per_block = 0.0; // 0 -> initial hash * target time
    PriceModel price;
};

struct MinerSetup {
    std::string name;
    double hash_rate = 0.0;
    std::string coin;
    double electricity = 0.0;
    bool migratory = false;
    bool accept_bribes = false;
    int count = 1;
};

struct PoolSetup {
    std::string name;
    std::string coin;
    int members = 1;
    double member_hash_rate = 0.0;
    ManagerStrategy strategy = ManagerStrategy::Honest;
    WorkProtocol protocol = WorkProtocol::H0Only;
    std::string redirect_coin; // cross_coin_redirect target
};

struct PeerSetup {
    std::string name;
    bool confirmer = false;
    int count = 1;
};

struct AttackSetup {
    enum class Type { DoubleSpend, HiddenFork };
    Type type = Type::DoubleSpend;
    std::string coin;
    std::string pool;           // hidden fork: attacking pool name
    double attacker_hash = 0.0; // double spend: rented/owned hash
    double rented_fraction = 1.0;
    std::int64_t z_wait = 6;
    double trigger = 0.0;
    double deadline = 0.0; // 0 -> 20 * z_wait * block_time
    double budget = 0.0;   // 0 -> unlimited
    Amount value = 0;      // coin amount double-spent
    double premium = 0.0;
    bool displace = false; // lure migratory hash off the coin first
    double bribe = 0.0;    // per-miner bribe for including the replacement
};

struct MarketSetup {
    bool enabled = false;
    HashMarket market;
};

// An ordinary payment broadcast mid-run (no conflict, no attacker).
struct PaymentSetup {
    std::string coin;
    Amount amount = 0;
    double at = 0.0;
};

struct SimSetup {
    std::string name = "sim";
    std::uint64_t master_seed = 1;
    double duration = 3600.0;
    std::vector<CoinSetup> coins;
    std::vector<MinerSetup> miners;
    std::vector<PoolSetup> pools;
    std::vector<PeerSetup> peers;
    LatencyModel latency = LatencyModel::fixed(1.0);
    MarketSetup market;
    std::vector<AttackSetup> attacks;
    std::vector<PaymentSetup> payments;
    DefenseVariant variant = DefenseVariant::Baseline;
    double adjudication_threshold = 20.0;
    int confirmer_depth = 3;                        // K
    Amount confirmer_fee = kMicroPerCoin / 1000;    // C_f, 0.001 coin
    std::int32_t share_evidence_zeros = 48;
    double work_cadence = 30.0;            // pool job push period, seconds
    double metrics_interval = 600.0;
    bool record_traces = false;
    bool collect_event_log = false;
    bool stop_after_attacks = false; // end the run once every attack settles
};

struct MetricsRow {
    double time_s = 0.0;
    double hash_rate = 0.0;
    double difficulty = 0.0;
    std::int64_t height = 0;
    double fork_rate_window = 0.0;
    double price = 0.0;
    double profitability_mean = 0.0;
};

struct CoinRunStats {
    std::string label;
    std::int64_t final_height = 0;
    Amount minted_supply = 0;
    Amount schedule_supply = 0; // sum of reward_at over main-chain heights
    ForkStatistics forks;
    std::vector<MetricsRow> series;
    std::map<ActorId, std::int64_t> blocks_by_miner; // main chain
};

class Engine {
public:
    explicit Engine(SimSetup setup);

    void run(); // to setup.duration

    // Results and probes.
    const SimSetup& setup() const { return setup_; }
    std::vector<CoinRunStats> coin_stats() const;
    const std::vector<AttackOutcome>& attack_outcomes() const { return outcomes_; }
    const std::map<std::string, std::vector<std::string>>& traces() const { return traces_; }
    std::int64_t redirect_detections() const { return redirect_detections_; }

    const BlockTree& observer_tree(const std::string& coin) const;
    const BlockTree& node_tree(const std::string& coin, NodeId node) const;
    NodeId observer_node() const { return observer_; }
    std::size_t node_count() const { return node_names_.size(); }
    const std::string& node_name(NodeId n) const { return node_names_[n]; }

    double total_hash_on(const std::string& coin) const;

    const std::vector<Hash256>& payment_txs() const { return payment_txs_; }
    std::int64_t evidence_count(const Hash256& tx_id, EvidenceSource source) const;
    // When the tx was usable: earliest credible evidence plus the rule
    // threshold under timestamped variants, else its first confirmation.
    double acceptance_time(const std::string& coin, const Hash256& tx_id) const;

    const EventQueue& queue() const { return q_; }

    // True when any honest node's tree holds the given block id.
    bool honest_nodes_contain(const std::string& coin, const Hash256& id) const;

private:
    struct CoinRt {
        CoinSpec spec;
        Difficulty diff;
        PriceModel price;
        std::vector<BlockTree> trees; // one per node
        Hash256 genesis;
        std::int64_t last_retarget = 0;
        std::int64_t prev_total = 0, prev_stale = 0; // metrics window
        int parent_coin = -1;                        // merged mining
        std::vector<MetricsRow> series;
    };

    struct Unit {
        std::string name;
        ActorId actor = 0;
        double hash_rate = 0.0;
        int pool = -1;   // pools_ index, -1 for solo
        int attack = -1; // attacks_ index when this is the attacker's rig
        std::string coin;
        NodeId node = 0;
        EventQueue::Handle pending = 0;
        bool has_pending = false;
        EventQueue::Handle child_pending = 0; // merged-mining residual clock
        bool has_child_pending = false;
        std::unique_ptr<RngStream> stream;
        bool migratory = false;
        bool accept_bribes = false;
        double electricity = 0.0;
        bool off = false;
    };

    struct PoolRt {
        PoolActor actor;
        NodeId node = 0;
        std::vector<std::size_t> member_units;
        std::string redirect_coin;
        int attack = -1; // hidden-fork plan driven by this pool
        std::unique_ptr<RngStream> work_stream;
    };

    struct AttackRt {
        AttackSetup setup;
        DoubleSpendPlan plan;
        enum class Phase { Idle, PreMine, Racing, Done } phase = Phase::Idle;
        NodeId attacker_node = 0;
        int unit = -1; // rented rig unit index (solo attacks)
        int pool = -1; // hidden fork pool index
        Hash256 fork_parent{};
        double fork_parent_work = 0.0;
        std::int64_t fork_parent_height = 0;
        std::vector<BlockTree::BlockPtr> secret;
        double secret_work = 0.0;
        bool bribe_mode = false; // no secret mining, just a mempool race
        bool victim_broadcast = false;
        bool published = false;
        bool shipped = false;
        double start_time = 0.0;
        double rental_started = 0.0;
        double rental_rate_cost = 0.0; // currency per second while racing
        std::vector<std::pair<std::size_t, std::string>> displaced; // unit, old coin
        AttackOutcome outcome;
    };

    // Construction
    void build_world();
    void seed_mining();

    // Event handlers
    void on_unit_found(std::size_t ui);
    void on_child_found(std::size_t ui);
    void on_arrival(NodeId node, int ci, BlockTree::BlockPtr block);
    void on_tx_arrival(NodeId node, int ci, const Hash256& tx_id, double at);
    void on_market_tick();
    void on_metrics_sample();
    void on_work_push(std::size_t pi);
    void on_attack_trigger(std::size_t ai);
    void on_attack_deadline(std::size_t ai);

    // Mechanics
    void schedule_unit(std::size_t ui);
    void reschedule_all_units_on(const std::string& coin);
    double unit_rate(const Unit& u) const;
    void broadcast_block(NodeId origin, int ci, BlockTree::BlockPtr block);
    void broadcast_tx(NodeId origin, int ci, const Transaction& tx, double at);
    BlockTree::BlockPtr make_block(int ci, const Hash256& parent, std::int64_t height,
                                   ActorId miner, double at, std::vector<Transaction> txs);
    std::vector<Transaction> select_txs(int ci, NodeId node, const Unit& u);
    void maybe_retarget(int ci);
    void check_ship(std::size_t ai);
    void maybe_publish(std::size_t ai);
    void finish_attack(std::size_t ai, bool success, bool budget_abort, bool deadline_abort);
    void apply_displacement(std::size_t ai);
    void restore_displacement(std::size_t ai);
    bool tx_blocked_by_defense(const Transaction& tx) const;
    bool block_ok_for_honest(const Block& b) const;
    void add_evidence(const Hash256& tx_id, TimestampEvidence ev);
    void run_rpca_vote(int ci);
    void record_work_trace(std::size_t pi, const WorkItem& item);
    void generate_share_window(std::size_t ui, double t0);

    int coin_of(const std::string& label) const;

    SimSetup setup_;
    EventQueue q_;
    std::vector<CoinRt> coins_;
    std::map<std::string, int> coin_index_;
    std::vector<Unit> units_;
    std::map<std::string, std::size_t> unit_index_;
    std::vector<PoolRt> pools_;
    std::map<std::string, std::size_t> pool_index_;
    std::vector<AttackRt> attacks_;
    std::vector<NodeId> honest_nodes_;
    std::vector<NodeId> confirmer_nodes_;
    std::vector<std::string> node_names_;
    PeerGraph graph_;
    RngStream net_stream_;
    RngStream market_stream_;
    NodeId observer_ = 0;

    // Shared transaction registry and evidence (honest consensus view).
    std::map<Hash256, Transaction> tx_registry_;
    std::map<Hash256, std::vector<TimestampEvidence>> evidence_;
    std::map<OutputRef, std::vector<Hash256>> spenders_;
    std::map<int, std::vector<Hash256>> mempool_; // per coin, broadcast order
    std::map<Hash256, double> bribes_;            // replacement tx -> bribe
    std::map<Hash256, int> rpca_verdict_;         // -1 rejected, 1 approved
    std::set<Hash256> tx_confirm_started_;
    bool rpca_ran_ = false;

    std::vector<Hash256> payment_txs_;
    std::vector<AttackOutcome> outcomes_;
    std::map<std::string, std::vector<std::string>> traces_;
    std::int64_t redirect_detections_ = 0;
    std::int64_t attacks_done_ = 0;
};

// Convenience: run the same setup under a different defense variant, same
// seed. Used for paired comparisons.
struct DefenseEvaluation {
    DefenseVariant variant;
    double success_rate = 0.0;
    std::int64_t successes = 0;
    std::int64_t runs = 0;
    std::int64_t detections = 0;
    double mean_time_to_acceptance = -1.0;
};

} // namespace chainlab
