#include "chainlab/network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace chainlab {

std::pair<double, double> calibrate_lognormal(double median, double mean) {
    if (!(median > 0))
        throw SimError("calibrate_lognormal: median must be > 0");
    if (mean < median)
        throw MeanBelowMedianError("calibrate_lognormal: mean " + std::to_string(mean) +
                                   " below median " + std::to_string(median));
    double mu = std::log(median);
    double sigma = std::sqrt(2.0 * std::log(mean / median));
    return {mu, sigma};
}

double LatencyModel::draw(RngStream& rng) const {
    switch (family) {
    case LatencyFamily::Fixed:
        return fixed_delay;
    case LatencyFamily::Lognormal: {
        auto [mu, sigma] = calibrate_lognormal(median, mean);
        return rng.lognormal(mu, sigma);
    }
    case LatencyFamily::PerEdge:
        return fixed_delay; // per-edge delays come from the graph
    }
    return fixed_delay;
}

void PeerGraph::add_edge(NodeId a, NodeId b, double delay) {
    nodes_.insert(a);
    nodes_.insert(b);
    if (a > b)
        std::swap(a, b);
    edges_[{a, b}] = delay;
}

std::optional<double> PeerGraph::edge_delay(NodeId a, NodeId b) const {
    if (a > b)
        std::swap(a, b);
    auto it = edges_.find({a, b});
    if (it == edges_.end())
        return std::nullopt;
    return it->second;
}

bool PeerGraph::edge_active(NodeId a, NodeId b, double t) const {
    if (a > b)
        std::swap(a, b);
    bool present = complete() || edges_.count({a, b}) != 0;
    for (const auto& ch : partition_schedule_) {
        if (ch.at > t)
            continue;
        NodeId ca = std::min(ch.a, ch.b), cb = std::max(ch.a, ch.b);
        if (ca == a && cb == b)
            present = !ch.remove;
    }
    return present;
}

std::vector<NodeId> PeerGraph::reachable(NodeId origin, double t) const {
    std::vector<NodeId> out;
    if (!has_node(origin))
        return out;
    if (complete()) {
        out.assign(nodes_.begin(), nodes_.end());
        return out;
    }
    std::set<NodeId> seen{origin};
    std::queue<NodeId> frontier;
    frontier.push(origin);
    while (!frontier.empty()) {
        NodeId u = frontier.front();
        frontier.pop();
        out.push_back(u);
        for (NodeId v : nodes_) {
            if (seen.count(v))
                continue;
            if (edge_active(u, v, t)) {
                seen.insert(v);
                frontier.push(v);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Arrival> broadcast(const PeerGraph& graph, NodeId origin, double at,
                               const LatencyModel& latency, RngStream& rng) {
    if (!graph.has_node(origin))
        throw SimError("broadcast: origin not in graph");
    std::vector<Arrival> arrivals;
    for (NodeId n : graph.reachable(origin, at)) {
        if (n == origin) {
            arrivals.push_back({n, at});
            continue;
        }
        double delay;
        if (latency.family == LatencyFamily::PerEdge) {
            auto d = graph.edge_delay(origin, n);
            delay = d.value_or(latency.fixed_delay);
        } else {
            delay = latency.draw(rng);
        }
        arrivals.push_back({n, at + delay});
    }
    return arrivals;
}

} // namespace chainlab
