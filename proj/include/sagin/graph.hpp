#pragma once

// Time-snapshot network graphs: nodes with queuing delay, directed edges
// with (delay, throughput, lifetime) metrics.

#include <cstdint>
#include <cstring>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sagin/linkmodel.hpp"

#include <nlohmann/json.hpp>

namespace sagin {

enum Layer : unsigned {
    layer_aanet = 1u << 0,
    layer_leo = 1u << 1,
    layer_ground = 1u << 2,
    layer_all = layer_aanet | layer_leo | layer_ground,
};

inline Layer layer_of(NodeKind k) {
    switch (k) {
        case NodeKind::airplane: return layer_aanet;
        case NodeKind::satellite: return layer_leo;
        default: return layer_ground;
    }
}

struct QueuingModel {
    enum class Variant { constant, trunc_gauss };
    Variant variant = Variant::constant;
    double mean_s = 0.010;
    double std_s = 0.005;
    std::uint64_t seed = 0;

    static QueuingModel constant(double d_s) {
        return QueuingModel{Variant::constant, d_s, 0.0, 0};
    }
    static QueuingModel trunc_gauss(double mean_s, double std_s, std::uint64_t seed) {
        return QueuingModel{Variant::trunc_gauss, mean_s, std_s, seed};
    }

    // Deterministic per (seed, node_id, t); truncation to [0, inf) by
    // rejection.
    double draw(const std::string& node_id, double t) const {
        if (variant == Variant::constant) return mean_s;
        const std::uint64_t h = std::hash<std::string>{}(node_id);
        std::uint64_t tb;
        static_assert(sizeof(tb) == sizeof(t));
        std::memcpy(&tb, &t, sizeof(tb));
        std::seed_seq sq{seed, h, tb};
        std::mt19937_64 rng(sq);
        std::normal_distribution<double> gauss(mean_s, std_s);
        for (;;) {
            const double d = gauss(rng);
            if (d >= 0.0) return d;
        }
    }
};

struct SnapNode {
    std::string id;
    NodeKind kind = NodeKind::ship;
    GeoPos pos;
    double speed_kmh = 0.0;
    double heading_deg = 0.0;
    double queue_delay_s = 0.0;
};

struct Snapshot {
    double t = 0.0;
    unsigned layer_mask = layer_all;
    std::vector<SnapNode> nodes;                                   // sorted by id
    std::unordered_map<std::string, int> index;                    // id -> node slot
    std::vector<std::vector<std::pair<int, LinkMetrics>>> adj;     // directed, tx -> rx

    int require(const std::string& id) const {
        auto it = index.find(id);
        if (it == index.end()) throw std::invalid_argument("unknown node id: " + id);
        return it->second;
    }

    const LinkMetrics* edge(int from, int to) const {
        for (const auto& [j, m] : adj[from])
            if (j == to) return &m;
        return nullptr;
    }

    void add_node(SnapNode n) {
        index[n.id] = static_cast<int>(nodes.size());
        nodes.push_back(std::move(n));
        adj.emplace_back();
    }

    void add_edge(int from, int to, const LinkMetrics& m) { adj[from].push_back({to, m}); }
};

inline Snapshot build_snapshot(const Scenario& sc, double t, unsigned layers,
                               const QueuingModel& queuing,
                               const LinkBudgetConfig& cfg = {}) {
    if (t < 0.0 || t > sc.duration_s)
        throw std::out_of_range("snapshot time outside scenario span");

    Snapshot snap;
    snap.t = t;
    snap.layer_mask = layers;

    std::vector<const NodeTrace*> alive;
    for (const auto& tr : sc.traces) {
        if (!(layer_of(tr.kind) & layers)) continue;
        if (position_at(tr, t)) alive.push_back(&tr);
    }
    std::sort(alive.begin(), alive.end(),
              [](const NodeTrace* a, const NodeTrace* b) { return a->id < b->id; });

    std::vector<Kinematics> kin;
    for (const NodeTrace* tr : alive) {
        Kinematics k = *position_at(*tr, t);
        kin.push_back(k);
        snap.add_node(SnapNode{tr->id, tr->kind, k.pos, k.speed_kmh, k.heading_deg,
                               queuing.draw(tr->id, t)});
    }

    for (std::size_t i = 0; i < alive.size(); ++i) {
        for (std::size_t j = i + 1; j < alive.size(); ++j) {
            const NodeTrace &ta = *alive[i], &tb = *alive[j];
            if (!classify(ta.kind, tb.kind)) continue;
            if (!link_exists(ta.kind, kin[i], ta.id, tb.kind, kin[j], tb.id, cfg)) continue;
            const double life =
                link_lifetime(sc, ta, tb, t, 10.0, cfg.lifetime_horizon_s, cfg);
            const double d = slant_distance(kin[i].pos, kin[j].pos);
            auto dir = [&](NodeKind tx, NodeKind rx) {
                const RadioProfile& p = cfg.radios.select(tx, rx);
                LinkMetrics m;
                const double dd = std::max(d, 1e-3);
                m.throughput_bps = shannon_throughput_bps(p, dd);
                m.delay_s = d / kSpeedOfLightKmS + cfg.packet_bits / m.throughput_bps;
                m.lifetime_s = life;
                return m;
            };
            snap.add_edge(static_cast<int>(i), static_cast<int>(j), dir(ta.kind, tb.kind));
            snap.add_edge(static_cast<int>(j), static_cast<int>(i), dir(tb.kind, ta.kind));
        }
    }
    return snap;
}

struct NeighborInfo {
    std::string id;
    LinkMetrics metrics;    // forwarding node -> neighbor
    double queue_delay_s;   // neighbor's queuing delay
};

inline std::vector<NeighborInfo> neighbors(const Snapshot& snap, const std::string& id) {
    const int i = snap.require(id);
    std::vector<NeighborInfo> out;
    for (const auto& [j, m] : snap.adj[i])
        out.push_back({snap.nodes[j].id, m, snap.nodes[j].queue_delay_s});
    return out;
}

inline nlohmann::json snapshot_to_json(const Snapshot& snap) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : snap.nodes)
        nodes.push_back({{"id", n.id},
                         {"kind", kind_name(n.kind)},
                         {"lat_deg", n.pos.lat_deg},
                         {"lon_deg", n.pos.lon_deg},
                         {"alt_km", n.pos.alt_km},
                         {"speed_kmh", n.speed_kmh},
                         {"heading_deg", n.heading_deg},
                         {"queue_delay_s", n.queue_delay_s}});
    nlohmann::json edges = nlohmann::json::array();
    for (std::size_t i = 0; i < snap.adj.size(); ++i)
        for (const auto& [j, m] : snap.adj[i])
            edges.push_back({{"from", snap.nodes[i].id},
                             {"to", snap.nodes[j].id},
                             {"delay_s", m.delay_s},
                             {"throughput_bps", m.throughput_bps},
                             {"lifetime_s", m.lifetime_s}});
    return {{"t", snap.t}, {"layer_mask", snap.layer_mask}, {"nodes", nodes}, {"edges", edges}};
}

} // namespace sagin
