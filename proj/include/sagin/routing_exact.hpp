#pragma once

// Centralized ground truth: min-delay routing, epsilon-constraint
// transformation via link pruning, Pareto-front enumeration, training-label
// generation, and a brute-force enumeration oracle for testing.

#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <unordered_map>
#include <vector>

#include "sagin/graph.hpp"

namespace sagin {

inline constexpr double kCapThroughputBps = 10e9; // dst-sentinel throughput
inline constexpr double kCapLifetimeS = 86400.0;  // dst-sentinel lifetime

struct EpsConstraint {
    double eps_c_bps = 0.0;
    double eps_l_s = 0.0;
};

struct RoutePath {
    std::vector<std::string> nodes; // source first, destination last
    double delay_s = 0.0;
    double throughput_bps = kCapThroughputBps;
    double lifetime_s = kCapLifetimeS;
};

enum class RouteStatus { found, unreachable, infeasible };

struct RouteResult {
    RouteStatus status = RouteStatus::unreachable;
    RoutePath path;

    bool ok() const { return status == RouteStatus::found; }
};

// Recomputes a path's metric triple from snapshot edges. Queue delay is
// charged on entry at every node after the source.
inline RoutePath make_route(const Snapshot& snap, const std::vector<int>& idx) {
    RoutePath rp;
    for (int i : idx) rp.nodes.push_back(snap.nodes[i].id);
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
        const LinkMetrics* m = snap.edge(idx[k], idx[k + 1]);
        if (!m) throw std::logic_error("non-adjacent nodes in route");
        rp.delay_s += m->delay_s + snap.nodes[idx[k + 1]].queue_delay_s;
        rp.throughput_bps = std::min(rp.throughput_bps, m->throughput_bps);
        rp.lifetime_s = std::min(rp.lifetime_s, m->lifetime_s);
    }
    return rp;
}

namespace detail {

// transit rule: intermediate nodes must not be ships
inline bool can_transit(const Snapshot& snap, int node, int src, int dst) {
    return node == src || node == dst || snap.nodes[node].kind != NodeKind::ship;
}

inline bool edge_passes(const LinkMetrics& m, const EpsConstraint& eps) {
    return m.throughput_bps > eps.eps_c_bps && m.lifetime_s > eps.eps_l_s;
}

// Forward Dijkstra with lexicographic tie-break on the node-id sequence.
// Entries carry their full path so equal-delay candidates order correctly.
inline std::optional<std::vector<int>> dijkstra_lex(
    const Snapshot& snap, int src, int dst,
    const std::function<bool(const LinkMetrics&)>& keep_edge) {
    struct Entry {
        double dist;
        std::vector<std::string> key; // id sequence, for tie-break
        std::vector<int> path;
    };
    auto cmp = [](const Entry& a, const Entry& b) {
        if (a.dist != b.dist) return a.dist > b.dist;
        return a.key > b.key;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> pq(cmp);
    std::vector<double> best(snap.nodes.size(), std::numeric_limits<double>::infinity());
    std::vector<char> settled(snap.nodes.size(), 0);

    pq.push(Entry{0.0, {snap.nodes[src].id}, {src}});
    best[src] = 0.0;
    while (!pq.empty()) {
        Entry e = pq.top();
        pq.pop();
        const int u = e.path.back();
        if (settled[u]) continue;
        settled[u] = 1;
        if (u == dst) return e.path;
        if (!can_transit(snap, u, src, dst)) continue;
        for (const auto& [v, m] : snap.adj[u]) {
            if (settled[v] || !keep_edge(m)) continue;
            const double nd = e.dist + m.delay_s + snap.nodes[v].queue_delay_s;
            if (nd <= best[v]) {
                best[v] = nd;
                Entry ne{nd, e.key, e.path};
                ne.key.push_back(snap.nodes[v].id);
                ne.path.push_back(v);
                pq.push(std::move(ne));
            }
        }
    }
    return std::nullopt;
}

// Reverse single-source run from dst: returns per-node delay-to-dst and the
// next hop toward dst. keep_edge filters usable links; ships never relay.
struct ReverseLabels {
    std::vector<double> dist; // +inf when unreachable
    std::vector<int> next;    // -1 at dst / unreachable
};

inline ReverseLabels reverse_min_delay(
    const Snapshot& snap, int dst, const std::function<bool(const LinkMetrics&)>& keep_edge) {
    const int n = static_cast<int>(snap.nodes.size());
    ReverseLabels out{std::vector<double>(n, std::numeric_limits<double>::infinity()),
                      std::vector<int>(n, -1)};
    using QE = std::pair<double, int>;
    std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
    std::vector<char> settled(n, 0);
    out.dist[dst] = 0.0;
    pq.push({0.0, dst});
    while (!pq.empty()) {
        auto [d, j] = pq.top();
        pq.pop();
        if (settled[j]) continue;
        settled[j] = 1;
        if (j != dst && snap.nodes[j].kind == NodeKind::ship) continue; // no relaying
        for (const auto& [i, m_ji] : snap.adj[j]) {
            // need the forward edge i -> j
            const LinkMetrics* m = snap.edge(i, j);
            (void)m_ji;
            if (!m || settled[i] || !keep_edge(*m)) continue;
            const double nd = d + m->delay_s + snap.nodes[j].queue_delay_s;
            if (nd < out.dist[i] ||
                (nd == out.dist[i] && out.next[i] >= 0 &&
                 snap.nodes[j].id < snap.nodes[out.next[i]].id)) {
                out.dist[i] = nd;
                out.next[i] = j;
                pq.push({nd, i});
            }
        }
    }
    return out;
}

// Reverse widest-path run maximizing the bottleneck lifetime toward dst.
inline std::vector<double> reverse_max_bottleneck_lifetime(
    const Snapshot& snap, int dst, const std::function<bool(const LinkMetrics&)>& keep_edge) {
    const int n = static_cast<int>(snap.nodes.size());
    std::vector<double> best(n, -1.0);
    using QE = std::pair<double, int>;
    std::priority_queue<QE> pq; // max-heap on bottleneck
    best[dst] = kCapLifetimeS;
    pq.push({best[dst], dst});
    std::vector<char> settled(n, 0);
    while (!pq.empty()) {
        auto [w, j] = pq.top();
        pq.pop();
        if (settled[j]) continue;
        settled[j] = 1;
        if (j != dst && snap.nodes[j].kind == NodeKind::ship) continue;
        for (const auto& [i, unused] : snap.adj[j]) {
            (void)unused;
            const LinkMetrics* m = snap.edge(i, j);
            if (!m || settled[i] || !keep_edge(*m)) continue;
            const double nw = std::min(w, m->lifetime_s);
            if (nw > best[i]) {
                best[i] = nw;
                pq.push({nw, i});
            }
        }
    }
    return best;
}

} // namespace detail

inline RouteResult min_delay_path(const Snapshot& snap, const std::string& src,
                                  const std::string& dst) {
    const int s = snap.require(src), d = snap.require(dst);
    if (s == d) return {RouteStatus::found, make_route(snap, {s})};
    auto path = detail::dijkstra_lex(snap, s, d, [](const LinkMetrics&) { return true; });
    if (!path) return {RouteStatus::unreachable, {}};
    return {RouteStatus::found, make_route(snap, *path)};
}

// Min-delay path on the graph pruned to links with throughput strictly above
// eps_c and lifetime strictly above eps_l.
inline RouteResult constrained_min_delay(const Snapshot& snap, const std::string& src,
                                         const std::string& dst, const EpsConstraint& eps) {
    const int s = snap.require(src), d = snap.require(dst);
    if (s == d) return {RouteStatus::found, make_route(snap, {s})};
    auto path = detail::dijkstra_lex(
        snap, s, d, [&](const LinkMetrics& m) { return detail::edge_passes(m, eps); });
    if (!path) return {RouteStatus::infeasible, {}};
    return {RouteStatus::found, make_route(snap, *path)};
}

struct Label {
    double d_star_s = 0.0;
    double c_star_bps = 0.0;
    double l_star_s = 0.0;
    bool feasible = false;
};

struct LabelTable {
    EpsConstraint eps;
    std::string dst_id;
    std::unordered_map<std::string, Label> by_node; // non-ship nodes only

    const Label* find(const std::string& id) const {
        auto it = by_node.find(id);
        return it == by_node.end() ? nullptr : &it->second;
    }
};

namespace detail {

// Walks reverse next-hops from b to dst and reports the route triple.
inline RoutePath route_from_reverse(const Snapshot& snap, const ReverseLabels& rl, int b,
                                    int dst) {
    std::vector<int> idx{b};
    int cur = b;
    while (cur != dst) {
        cur = rl.next[cur];
        if (cur < 0) throw std::logic_error("broken reverse chain");
        idx.push_back(cur);
    }
    return make_route(snap, idx);
}

inline double violation(double c_bps, double l_s, const EpsConstraint& eps) {
    // normalized constraint violation; unit guards keep eps = 0 well defined
    const double vc = std::max(eps.eps_c_bps - c_bps, 0.0) / std::max(eps.eps_c_bps, 1.0);
    const double vl = std::max(eps.eps_l_s - l_s, 0.0) / std::max(eps.eps_l_s, 1.0);
    return vc + vl;
}

} // namespace detail

// Exact constrained labels (D*, C*, L*) from every non-ship node to dst.
// Infeasible nodes fall back to the reachable path minimizing the normalized
// constraint violation, tie-broken by minimum delay; marked infeasible.
inline LabelTable label_table(const Snapshot& snap, const std::string& dst,
                              const EpsConstraint& eps) {
    const int d = snap.require(dst);
    LabelTable table;
    table.eps = eps;
    table.dst_id = dst;

    auto feasible_edges = [&](const LinkMetrics& m) { return detail::edge_passes(m, eps); };
    auto rl = detail::reverse_min_delay(snap, d, feasible_edges);

    std::vector<int> pending; // reachable but constraint-infeasible nodes
    for (int b = 0; b < static_cast<int>(snap.nodes.size()); ++b) {
        if (snap.nodes[b].kind == NodeKind::ship) continue;
        if (b == d) {
            table.by_node[dst] = Label{0.0, kCapThroughputBps, kCapLifetimeS, true};
            continue;
        }
        if (std::isfinite(rl.dist[b])) {
            RoutePath rp = detail::route_from_reverse(snap, rl, b, d);
            table.by_node[snap.nodes[b].id] =
                Label{rp.delay_s, rp.throughput_bps, rp.lifetime_s, true};
        } else {
            pending.push_back(b);
        }
    }
    if (pending.empty()) return table;

    // Fallback search over the achievable bottleneck frontier: for each
    // distinct link-throughput level c, pruning to C >= c and maximizing the
    // bottleneck lifetime yields the best lifetime any C>=c path can reach.
    std::set<double> levels{0.0};
    for (const auto& nbrs : snap.adj)
        for (const auto& [j, m] : nbrs) levels.insert(m.throughput_bps);

    struct Frontier {
        double level;
        std::vector<double> lmax;
    };
    std::vector<Frontier> frontier;
    for (double c : levels) {
        auto lm = detail::reverse_max_bottleneck_lifetime(
            snap, d, [&](const LinkMetrics& m) { return m.throughput_bps >= c; });
        frontier.push_back({c, std::move(lm)});
    }

    for (int b : pending) {
        double vmin = std::numeric_limits<double>::infinity();
        for (const auto& fr : frontier) {
            if (fr.lmax[b] < 0.0) continue;
            vmin = std::min(vmin, detail::violation(fr.level, fr.lmax[b], eps));
        }
        if (!std::isfinite(vmin)) {
            // fully unreachable from b: zero-metric sentinel
            table.by_node[snap.nodes[b].id] = Label{0.0, 0.0, 0.0, false};
            continue;
        }
        // among all levels achieving vmin, take the minimum-delay path that
        // holds the violation at vmin
        RoutePath best;
        bool have = false;
        for (const auto& fr : frontier) {
            if (fr.lmax[b] < 0.0) continue;
            const double v = detail::violation(fr.level, fr.lmax[b], eps);
            if (v > vmin + 1e-12) continue;
            const double vc = std::max(eps.eps_c_bps - fr.level, 0.0) /
                              std::max(eps.eps_c_bps, 1.0);
            const double slack = vmin - vc; // lifetime violation budget
            const double l_req = eps.eps_l_s - slack * std::max(eps.eps_l_s, 1.0);
            auto rl2 = detail::reverse_min_delay(snap, d, [&](const LinkMetrics& m) {
                return m.throughput_bps >= fr.level && m.lifetime_s >= l_req - 1e-9;
            });
            if (!std::isfinite(rl2.dist[b])) continue;
            RoutePath rp = detail::route_from_reverse(snap, rl2, b, d);
            if (detail::violation(rp.throughput_bps, rp.lifetime_s, eps) > vmin + 1e-12)
                continue;
            if (!have || rp.delay_s < best.delay_s) {
                best = std::move(rp);
                have = true;
            }
        }
        if (have)
            table.by_node[snap.nodes[b].id] =
                Label{best.delay_s, best.throughput_bps, best.lifetime_s, false};
        else
            table.by_node[snap.nodes[b].id] = Label{0.0, 0.0, 0.0, false};
    }
    return table;
}

struct MetricTriple {
    double delay_s = 0.0;
    double throughput_bps = 0.0;
    double lifetime_s = 0.0;
};

// a dominates b: no worse in all objectives, strictly better in one
// (minimize delay, maximize throughput and lifetime).
inline bool dominates(const MetricTriple& a, const MetricTriple& b) {
    const bool no_worse = a.delay_s <= b.delay_s && a.throughput_bps >= b.throughput_bps &&
                          a.lifetime_s >= b.lifetime_s;
    const bool strict = a.delay_s < b.delay_s || a.throughput_bps > b.throughput_bps ||
                        a.lifetime_s > b.lifetime_s;
    return no_worse && strict;
}

inline MetricTriple triple_of(const RoutePath& p) {
    return {p.delay_s, p.throughput_bps, p.lifetime_s};
}

// Default sweep grid: eps_C in {0..70} Mbps step 5, eps_L in {0..30} min
// step 5.
inline std::vector<EpsConstraint> default_eps_grid() {
    std::vector<EpsConstraint> grid;
    for (int c = 0; c <= 70; c += 5)
        for (int l = 0; l <= 30; l += 5)
            grid.push_back({c * 1e6, l * 60.0});
    return grid;
}

inline std::vector<std::pair<RoutePath, MetricTriple>> pareto_front(
    const Snapshot& snap, const std::string& src, const std::string& dst,
    const std::vector<EpsConstraint>& grid) {
    std::vector<std::pair<RoutePath, MetricTriple>> found;
    for (const auto& eps : grid) {
        auto res = constrained_min_delay(snap, src, dst, eps);
        if (!res.ok()) continue;
        const MetricTriple tr = triple_of(res.path);
        bool dup = false;
        for (const auto& [p, t2] : found)
            if (t2.delay_s == tr.delay_s && t2.throughput_bps == tr.throughput_bps &&
                t2.lifetime_s == tr.lifetime_s) {
                dup = true;
                break;
            }
        if (!dup) found.push_back({std::move(res.path), tr});
    }
    std::vector<std::pair<RoutePath, MetricTriple>> front;
    for (const auto& cand : found) {
        bool dominated = false;
        for (const auto& other : found)
            if (dominates(other.second, cand.second)) {
                dominated = true;
                break;
            }
        if (!dominated) front.push_back(cand);
    }
    std::sort(front.begin(), front.end(), [](const auto& a, const auto& b) {
        return a.second.delay_s < b.second.delay_s;
    });
    return front;
}

// Exhaustive simple-path enumeration; testing oracle for small snapshots.
inline std::vector<RoutePath> brute_force_paths(const Snapshot& snap, const std::string& src,
                                                const std::string& dst, int max_nodes = 12) {
    if (static_cast<int>(snap.nodes.size()) > max_nodes)
        throw std::invalid_argument("snapshot too large for brute force");
    const int s = snap.require(src), d = snap.require(dst);
    std::vector<RoutePath> out;
    std::vector<int> path{s};
    std::vector<char> used(snap.nodes.size(), 0);
    used[s] = 1;
    auto dfs = [&](auto&& self, int u) -> void {
        if (u == d) {
            out.push_back(make_route(snap, path));
            return;
        }
        if (!detail::can_transit(snap, u, s, d)) return;
        for (const auto& [v, m] : snap.adj[u]) {
            (void)m;
            if (used[v]) continue;
            used[v] = 1;
            path.push_back(v);
            self(self, v);
            path.pop_back();
            used[v] = 0;
        }
    };
    dfs(dfs, s);
    return out;
}

// ---- Label dataset CSV (format v1) --------------------------------------

inline void save_labels(const std::string& path,
                        const std::vector<std::tuple<double, std::string, std::string,
                                                     EpsConstraint, Label>>& rows) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "# sagin-labels v1\n";
    f << "t_s,b_id,dst_id,eps_c_bps,eps_l_s,d_star_s,c_star_bps,l_star_s,feasible\n";
    f.precision(17);
    for (const auto& [t, b, dst, eps, lab] : rows)
        f << t << ',' << b << ',' << dst << ',' << eps.eps_c_bps << ',' << eps.eps_l_s << ','
          << lab.d_star_s << ',' << lab.c_star_bps << ',' << lab.l_star_s << ','
          << (lab.feasible ? 1 : 0) << '\n';
}

inline std::vector<std::tuple<double, std::string, std::string, EpsConstraint, Label>>
load_labels(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(f, line) || line.rfind("# sagin-labels v1", 0) != 0)
        throw std::runtime_error("unrecognized label file version: " + path);
    std::getline(f, line); // header
    std::vector<std::tuple<double, std::string, std::string, EpsConstraint, Label>> rows;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string t_s, b, dst, f1, f2, f3, f4, f5, f6;
        std::getline(ss, t_s, ',');
        std::getline(ss, b, ',');
        std::getline(ss, dst, ',');
        std::getline(ss, f1, ',');
        std::getline(ss, f2, ',');
        std::getline(ss, f3, ',');
        std::getline(ss, f4, ',');
        std::getline(ss, f5, ',');
        std::getline(ss, f6, ',');
        rows.push_back({std::stod(t_s), b, dst,
                        EpsConstraint{std::stod(f1), std::stod(f2)},
                        Label{std::stod(f3), std::stod(f4), std::stod(f5),
                              std::stoi(f6) != 0}});
    }
    return rows;
}

} // namespace sagin
