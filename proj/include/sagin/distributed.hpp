#pragma once

// Online routing engine: greedy next-hop selection from per-neighbor
// feedback plus learned remaining-metric estimates, optional one-level
// recursive lookahead, and full-path rollout with loop protection.

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "sagin/neural.hpp"

namespace sagin {

struct LabelEstimate {
    double d_s = 0.0;
    double c_bps = 0.0;
    double l_s = 0.0;
};

// Estimate of the constrained remaining metrics from node b to the DN.
// Model-backed estimators use only the kinematics; oracle estimators for
// testing may key on the node id.
using Estimator = std::function<LabelEstimate(
    const Kinematics& fn, const Kinematics& b, const Kinematics& dn, const EpsConstraint& eps,
    const std::string& b_id)>;

inline Estimator mlp_estimator(const Mlp& model) {
    return [&model](const Kinematics& fn, const Kinematics& b, const Kinematics& dn,
                    const EpsConstraint& eps, const std::string&) {
        MetricTriple t = predict(model, feature_vector(fn, b, dn, eps));
        return LabelEstimate{t.delay_s, t.throughput_bps, t.lifetime_s};
    };
}

struct NeighborFeedback {
    std::string id;
    Kinematics kin;
    double link_delay_s = 0.0;
    double queue_delay_s = 0.0;
    double throughput_bps = 0.0;
    double lifetime_s = 0.0;
};

struct LocalView {
    std::string fn_id;
    Kinematics fn;
    std::string dn_id;
    Kinematics dn;
    EpsConstraint eps;
    std::vector<NeighborFeedback> neighbors; // snapshot-adjacent, non-ship, non-visited
};

struct HopCandidate {
    std::string id;
    double score = 0.0;
    double penalty = 0.0;
    LabelEstimate estimate;
};

struct HopDecision {
    std::string fn_id;
    std::string chosen_id;
    std::vector<HopCandidate> candidates;
};

inline constexpr double kDefaultPenaltyLambda = 10.0;

namespace detail {

// Penalty unit convention: delays in milliseconds, throughput in Mbps,
// lifetime in minutes, one dimensionless lambda over all terms.
inline double penalty_terms(double lambda, const EpsConstraint& eps, double link_c_bps,
                            double link_l_s, double est_c_bps, double est_l_s) {
    const double eps_c = eps.eps_c_bps / 1e6, eps_l = eps.eps_l_s / 60.0;
    auto pos = [](double x) { return std::max(x, 0.0); };
    return lambda * (pos(eps_c - link_c_bps / 1e6) + pos(eps_c - est_c_bps / 1e6) +
                     pos(eps_l - link_l_s / 60.0) + pos(eps_l - est_l_s / 60.0));
}

inline LabelEstimate estimate_for(const LocalView& view, const NeighborFeedback& nb,
                                  const Estimator& est) {
    if (nb.id == view.dn_id) return {0.0, kCapThroughputBps, kCapLifetimeS};
    LabelEstimate e = est(view.fn, nb.kin, view.dn, view.eps, nb.id);
    // clamp to the physical range; keeps zero-threshold penalties at zero
    e.d_s = std::max(e.d_s, 0.0);
    e.c_bps = std::max(e.c_bps, 0.0);
    e.l_s = std::max(e.l_s, 0.0);
    return e;
}

} // namespace detail

enum class HopMode { so, mo };

// Greedy next-hop: argmin over neighbors of measured one-hop delay plus
// estimated remaining delay (and, in mo mode, the constraint penalties).
// Deterministic tie-break by node id. Empty view yields no selection.
inline std::optional<std::string> next_hop(const LocalView& view, const Estimator& est,
                                           HopMode mode,
                                           double lambda = kDefaultPenaltyLambda,
                                           HopDecision* log = nullptr) {
    std::optional<std::string> best;
    double best_score = 0.0;
    if (log) {
        log->fn_id = view.fn_id;
        log->candidates.clear();
    }
    for (const auto& nb : view.neighbors) {
        const LabelEstimate e = detail::estimate_for(view, nb, est);
        double score = (nb.link_delay_s + nb.queue_delay_s + e.d_s) * 1e3; // ms
        double pen = 0.0;
        if (mode == HopMode::mo) {
            pen = detail::penalty_terms(lambda, view.eps, nb.throughput_bps, nb.lifetime_s,
                                        e.c_bps, e.l_s);
            score += pen;
        }
        if (log) log->candidates.push_back({nb.id, score, pen, e});
        if (!best || score < best_score || (score == best_score && nb.id < *best)) {
            best = nb.id;
            best_score = score;
        }
    }
    if (log && best) log->chosen_id = *best;
    return best;
}

inline std::optional<std::string> next_hop_so(const LocalView& view, const Estimator& est,
                                              HopDecision* log = nullptr) {
    return next_hop(view, est, HopMode::so, 0.0, log);
}

inline std::optional<std::string> next_hop_mo(const LocalView& view, const Estimator& est,
                                              double lambda = kDefaultPenaltyLambda,
                                              HopDecision* log = nullptr) {
    return next_hop(view, est, HopMode::mo, lambda, log);
}

// One-level recursive lookahead: each neighbor's remaining cost is replaced
// by the best measured-next-hop expansion over its own view.
inline std::optional<std::string> next_hop_recursive(
    const LocalView& view, const std::function<const LocalView*(const std::string&)>& extended,
    const Estimator& est, HopMode mode, double lambda = kDefaultPenaltyLambda,
    HopDecision* log = nullptr) {
    std::optional<std::string> best;
    double best_score = 0.0;
    if (log) {
        log->fn_id = view.fn_id;
        log->candidates.clear();
    }
    for (const auto& nb : view.neighbors) {
        double remaining;
        LabelEstimate e = detail::estimate_for(view, nb, est);
        if (nb.id == view.dn_id) {
            remaining = 0.0;
        } else if (const LocalView* bv = extended(nb.id); bv && !bv->neighbors.empty()) {
            remaining = std::numeric_limits<double>::infinity();
            for (const auto& nb2 : bv->neighbors) {
                const LabelEstimate e2 = detail::estimate_for(*bv, nb2, est);
                double r = (nb2.link_delay_s + nb2.queue_delay_s + e2.d_s) * 1e3;
                if (mode == HopMode::mo)
                    r += detail::penalty_terms(lambda, view.eps, nb2.throughput_bps,
                                               nb2.lifetime_s, e2.c_bps, e2.l_s);
                remaining = std::min(remaining, r);
            }
        } else {
            remaining = e.d_s * 1e3;
            if (mode == HopMode::mo)
                remaining += detail::penalty_terms(lambda, view.eps, kCapThroughputBps,
                                                   kCapLifetimeS, e.c_bps, e.l_s);
        }
        double score = (nb.link_delay_s + nb.queue_delay_s) * 1e3 + remaining;
        double pen = 0.0;
        if (mode == HopMode::mo) {
            pen = detail::penalty_terms(lambda, view.eps, nb.throughput_bps, nb.lifetime_s,
                                        kCapThroughputBps, kCapLifetimeS);
            score += pen;
        }
        if (log) log->candidates.push_back({nb.id, score, pen, e});
        if (!best || score < best_score || (score == best_score && nb.id < *best)) {
            best = nb.id;
            best_score = score;
        }
    }
    if (log && best) log->chosen_id = *best;
    return best;
}

enum class RolloutMode { so, mo, mo_recursive };

enum class FailReason { dead_end, hop_limit };

struct RolloutResult {
    bool delivered = false;
    FailReason reason = FailReason::dead_end;
    RoutePath path;
    int hops = 0;
    std::vector<HopDecision> decisions;
};

// View of fn's neighborhood on the snapshot, excluding visited nodes and
// ships (packets never relay through ships).
inline LocalView local_view(const Snapshot& snap, const std::string& fn_id,
                            const std::string& dn_id, const EpsConstraint& eps,
                            const std::set<std::string>& visited) {
    LocalView v;
    v.fn_id = fn_id;
    v.dn_id = dn_id;
    v.eps = eps;
    const int fn = snap.require(fn_id);
    const int dn = snap.require(dn_id);
    v.fn = kin_of(snap.nodes[fn]);
    v.dn = kin_of(snap.nodes[dn]);
    for (const auto& [j, m] : snap.adj[fn]) {
        const SnapNode& n = snap.nodes[j];
        if (visited.count(n.id)) continue;
        if (n.kind == NodeKind::ship && n.id != dn_id) continue;
        v.neighbors.push_back({n.id, kin_of(n), m.delay_s, n.queue_delay_s, m.throughput_bps,
                               m.lifetime_s});
    }
    std::sort(v.neighbors.begin(), v.neighbors.end(),
              [](const NeighborFeedback& a, const NeighborFeedback& b) { return a.id < b.id; });
    return v;
}

inline RolloutResult rollout(const Snapshot& snap, const std::string& src,
                             const std::string& dst, const EpsConstraint& eps,
                             const Estimator& est, RolloutMode mode,
                             double lambda = kDefaultPenaltyLambda, int hop_limit = 64) {
    RolloutResult out;
    std::vector<int> idx{snap.require(src)};
    if (src == dst) {
        out.delivered = true;
        out.path = make_route(snap, idx);
        return out;
    }
    std::set<std::string> visited{src};
    std::string cur = src;
    while (out.hops < hop_limit) {
        LocalView view = local_view(snap, cur, dst, eps, visited);
        HopDecision log;
        std::optional<std::string> nxt;
        switch (mode) {
            case RolloutMode::so:
                nxt = next_hop_so(view, est, &log);
                break;
            case RolloutMode::mo:
                nxt = next_hop_mo(view, est, lambda, &log);
                break;
            case RolloutMode::mo_recursive: {
                std::vector<LocalView> ext;
                ext.reserve(view.neighbors.size());
                for (const auto& nb : view.neighbors)
                    ext.push_back(local_view(snap, nb.id, dst, eps, visited));
                auto lookup = [&](const std::string& id) -> const LocalView* {
                    for (const auto& v : ext)
                        if (v.fn_id == id) return &v;
                    return nullptr;
                };
                nxt = next_hop_recursive(view, lookup, est, HopMode::mo, lambda, &log);
                break;
            }
        }
        if (!nxt) {
            out.reason = FailReason::dead_end;
            return out;
        }
        out.decisions.push_back(std::move(log));
        ++out.hops;
        visited.insert(*nxt);
        idx.push_back(snap.require(*nxt));
        cur = *nxt;
        if (cur == dst) {
            out.delivered = true;
            out.path = make_route(snap, idx);
            return out;
        }
    }
    out.reason = FailReason::hop_limit;
    return out;
}

inline nlohmann::json decisions_to_json(const std::vector<HopDecision>& decisions) {
    nlohmann::json lines = nlohmann::json::array();
    for (const auto& d : decisions) {
        nlohmann::json cands = nlohmann::json::array();
        for (const auto& c : d.candidates)
            cands.push_back({{"id", c.id},
                             {"score", c.score},
                             {"penalty", c.penalty},
                             {"d_est_s", c.estimate.d_s},
                             {"c_est_bps", c.estimate.c_bps},
                             {"l_est_s", c.estimate.l_s}});
        lines.push_back({{"fn", d.fn_id}, {"chosen", d.chosen_id}, {"candidates", cands}});
    }
    return lines;
}

} // namespace sagin
