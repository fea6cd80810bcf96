#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chainlab/chain.hpp"
#include "chainlab/errors.hpp"
#include "chainlab/hash.hpp"
#include "chainlab/mining.hpp"
#include "chainlab/sig.hpp"

namespace chainlab {

enum class EvidenceSource { NodeObservation, ConfirmerSpend, MinerShare, ExternalStamp };

struct TimestampEvidence {
    Hash256 tx_id{};
    EvidenceSource source = EvidenceSource::NodeObservation;
    double observed_at = 0.0;
    double weight = 1.0;
    bool adversarial = false; // test instrumentation only
};

enum class Adjudication { AcceptFirst, RejectBoth };

// What to do when the conflicting spends land within the threshold of each
// other. Rejecting both is the default reading; accepting whichever came
// first (however slightly) is the documented alternative.
enum class SimultaneousPolicy { RejectBoth, AcceptAnyOne };

struct AdjudicationResult {
    Adjudication decision = Adjudication::RejectBoth;
    Hash256 accepted{}; // valid when decision == AcceptFirst
    double t1 = 0.0;    // earliest credible evidence per transaction
    double t2 = 0.0;
};

// The 20-second rule: with conflicting spends, accept the earlier one only if
// the gap is strictly greater than the threshold; otherwise reject both.
// Evidence claiming times before the transaction could physically exist
// (created_at minus max network latency) is discarded as bribed.
AdjudicationResult adjudicate_pair(const Transaction& tx1, const Transaction& tx2,
                                   const std::vector<TimestampEvidence>& evidence,
                                   double threshold_seconds = 20.0,
                                   double max_network_latency = 60.0,
                                   SimultaneousPolicy policy = SimultaneousPolicy::RejectBoth);

struct ConfirmerPeer {
    NodeId node = 0;
    bool active_window = true; // active in the recent 2016 blocks
    std::int64_t confirmations_served = 0;
};

struct ConfirmationHop {
    NodeId peer = 0;
    int depth = 1;          // 1-based level in the confirmation tree
    Amount received = 0;    // K_level * C_f
    Amount kept = 0;        // C_f
    Amount forwarded = 0;   // (K_level - 1) * C_f, split across two peers
    double at = 0.0;
};

struct ConfirmationChain {
    Hash256 tx_id{};
    std::vector<ConfirmationHop> hops;
    Amount total_paid = 0; // 2 * K * C_f
    bool peers_reused = false;

    std::vector<TimestampEvidence> evidence(double base_time) const;
};

// Chained confirmer spends: the originator pays K*C_f to each of two peers
// picked pseudo-randomly from the active list; each keeps C_f and forwards
// (K-1)*C_f to two more, recursion depth K. Peer choice is a hash over
// (tx_id, list), so every node derives the same chain.
ConfirmationChain confirm_transaction(const Transaction& tx, int k, Amount c_f,
                                      const std::vector<ConfirmerPeer>& confirmer_list,
                                      double at);

// Share-based timestamp evidence; only shares at or above min_zeros count,
// each extra zero doubling the weight.
std::optional<TimestampEvidence> share_evidence(const Share& share, const Hash256& tx_id,
                                                std::int32_t min_zeros = 48);

struct UNLNode {
    NodeId id = 0;
    std::set<NodeId> unique_node_list;
    std::vector<Hash256> seen;   // candidate txs in arrival order
    std::vector<Hash256> closed; // this node's closed set after voting
};

// Simplified RPCA: synchronous voting rounds with thresholds rising to 0.8.
// A node votes YES on a candidate it has seen that conflicts with nothing it
// already accepted. Of a conflicting pair at most one survives.
std::vector<Hash256> rpca_round(std::vector<UNLNode>& nodes,
                                const std::vector<Transaction>& candidates,
                                const std::vector<double>& round_thresholds = {0.5, 0.6, 0.7, 0.8});

// H(prev_block_id XOR H(header)): computing it requires knowing the previous
// block, which is what defeats h0-only work distribution.
Hash256 plaintext_aware_hash(const std::vector<std::uint8_t>& header_bytes,
                             const Hash256& prev_block_id);
Hash256 plaintext_aware_hash(std::string_view header, const Hash256& prev_block_id);

enum class DefenseVariant {
    Baseline,
    Timestamped20s,
    Confirmers,
    Shares,
    Rpca,
    PlaintextAware,
    All,
};

const char* defense_variant_name(DefenseVariant v);
std::optional<DefenseVariant> parse_defense_variant(const std::string& name);

inline bool variant_uses_timestamps(DefenseVariant v) {
    return v == DefenseVariant::Timestamped20s || v == DefenseVariant::Confirmers ||
           v == DefenseVariant::Shares || v == DefenseVariant::All;
}
inline bool variant_uses_confirmers(DefenseVariant v) {
    return v == DefenseVariant::Confirmers || v == DefenseVariant::All;
}
inline bool variant_uses_shares(DefenseVariant v) {
    return v == DefenseVariant::Shares || v == DefenseVariant::All;
}
inline bool variant_uses_rpca(DefenseVariant v) {
    return v == DefenseVariant::Rpca || v == DefenseVariant::All;
}
inline bool variant_plaintext_aware(DefenseVariant v) {
    return v == DefenseVariant::PlaintextAware || v == DefenseVariant::All;
}

} // namespace chainlab
