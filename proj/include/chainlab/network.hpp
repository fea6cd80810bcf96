#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "chainlab/errors.hpp"
#include "chainlab/ids.hpp"
#include "chainlab/rng.hpp"

namespace chainlab {

enum class LatencyFamily { Fixed, Lognormal, PerEdge };

// mu = ln(median), sigma = sqrt(2 ln(mean/median)); recovers a lognormal
// matching the given median and mean exactly.
std::pair<double, double> calibrate_lognormal(double median, double mean);

struct LatencyModel {
    LatencyFamily family = LatencyFamily::Fixed;
    double fixed_delay = 0.0;
    double median = 6.5;
    double mean = 12.6;

    static LatencyModel fixed(double delay) {
        LatencyModel m;
        m.family = LatencyFamily::Fixed;
        m.fixed_delay = delay;
        return m;
    }
    static LatencyModel lognormal(double median, double mean) {
        LatencyModel m;
        m.family = LatencyFamily::Lognormal;
        m.median = median;
        m.mean = mean;
        calibrate_lognormal(median, mean); // validate up front
        return m;
    }

    double draw(RngStream& rng) const;
};

struct EdgeChange {
    double at = 0.0;
    NodeId a = 0;
    NodeId b = 0;
    bool remove = true;
};

// Peer graph with per-edge delays. Without explicit edges the graph is
// complete; propagation is one end-to-end delay draw per receiver rather than
// hop-by-hop flooding.
class PeerGraph {
public:
    void add_node(NodeId n) { nodes_.insert(n); }
    void add_edge(NodeId a, NodeId b, double delay = 0.0);
    void schedule_partition(EdgeChange change) { partition_schedule_.push_back(change); }

    bool has_node(NodeId n) const { return nodes_.count(n) != 0; }
    std::size_t node_count() const { return nodes_.size(); }
    const std::set<NodeId>& nodes() const { return nodes_; }
    bool complete() const { return edges_.empty() && partition_schedule_.empty(); }

    // Nodes reachable from origin over edges active at time t (origin
    // included). On a complete graph this is every node.
    std::vector<NodeId> reachable(NodeId origin, double t) const;

    std::optional<double> edge_delay(NodeId a, NodeId b) const;

private:
    bool edge_active(NodeId a, NodeId b, double t) const;

    std::set<NodeId> nodes_;
    std::map<std::pair<NodeId, NodeId>, double> edges_;
    std::vector<EdgeChange> partition_schedule_;
};

struct Arrival {
    NodeId node = 0;
    double at = 0.0;
};

// Best-effort broadcast: every reachable node other than the origin gets one
// arrival drawn from the latency model; the origin sees the payload at `at`;
// unreachable nodes get nothing.
std::vector<Arrival> broadcast(const PeerGraph& graph, NodeId origin, double at,
                               const LatencyModel& latency, RngStream& rng);

} // namespace chainlab
