#pragma once

// Per-link radio physics: link classification, free-space loss, link-budget
// SNR, Shannon throughput, delay, and remaining-visibility lifetime.

#include <map>
#include <optional>
#include <string>

#include "sagin/geo.hpp"
#include "sagin/mobility.hpp"

namespace sagin {

enum class LinkClass { A2A, A2G, S2A, S2G, ISL };

inline const char* link_class_name(LinkClass c) {
    switch (c) {
        case LinkClass::A2A: return "A2A";
        case LinkClass::A2G: return "A2G";
        case LinkClass::S2A: return "S2A";
        case LinkClass::S2G: return "S2G";
        case LinkClass::ISL: return "ISL";
    }
    return "?";
}

inline bool is_ground_kind(NodeKind k) {
    return k == NodeKind::ship || k == NodeKind::ground_station || k == NodeKind::base_station;
}

// Classification by endpoint kinds; unsupported pairs (ship-ship, GS-GS,
// satellite-BS, ...) yield nothing.
inline std::optional<LinkClass> classify(NodeKind a, NodeKind b) {
    auto pair_is = [&](NodeKind x, NodeKind y) {
        return (a == x && b == y) || (a == y && b == x);
    };
    if (a == NodeKind::airplane && b == NodeKind::airplane) return LinkClass::A2A;
    if (a == NodeKind::satellite && b == NodeKind::satellite) return LinkClass::ISL;
    if (pair_is(NodeKind::satellite, NodeKind::airplane)) return LinkClass::S2A;
    if (pair_is(NodeKind::satellite, NodeKind::ship) ||
        pair_is(NodeKind::satellite, NodeKind::ground_station))
        return LinkClass::S2G;
    if (a == NodeKind::airplane && is_ground_kind(b)) return LinkClass::A2G;
    if (b == NodeKind::airplane && is_ground_kind(a)) return LinkClass::A2G;
    return std::nullopt;
}

struct RadioProfile {
    double carrier_ghz = 14.0;
    double bandwidth_per_link_mhz = 10.0;
    double tx_power_dbm = 30.0;
    double tx_gain_dbi = 25.0;
    double gt_db_per_k = 1.5; // receive gain-to-noise-temperature
};

struct RadioTable {
    RadioProfile a2a{14.0, 10.0, 30.0, 25.0, 1.5};
    RadioProfile a2g{14.0, 10.0, 30.0, 25.0, 1.2};       // air-layer tx, GS/ship rx
    RadioProfile g2a{14.0, 10.0, 30.0, 25.0, 1.5};       // ground tx, airplane rx
    RadioProfile sat_down_air{20.0, 5.0, 21.5, 38.5, 16.2};
    RadioProfile sat_down_ground{20.0, 5.0, 21.5, 38.5, 15.9};
    RadioProfile sat_up{30.0, 5.0, 33.0, 43.2, 13.0};
    RadioProfile isl{23.0, 400.0, 21.5, 38.5, 13.0};

    // Profile for transmitter kind tx sending to receiver kind rx.
    const RadioProfile& select(NodeKind tx, NodeKind rx) const {
        if (tx == NodeKind::satellite && rx == NodeKind::satellite) return isl;
        if (tx == NodeKind::satellite)
            return rx == NodeKind::airplane ? sat_down_air : sat_down_ground;
        if (rx == NodeKind::satellite) return sat_up;
        if (tx == NodeKind::airplane && rx == NodeKind::airplane) return a2a;
        if (rx == NodeKind::airplane) return g2a;
        return a2g;
    }
};

struct LinkBudgetConfig {
    RadioTable radios;
    double footprint_slant_km = 2300.0; // satellite full-beam reach
    double bs_coverage_km = 50.0;       // on-shore BS ground radius
    double packet_bits = 8192.0;        // 1 KByte
    double lifetime_horizon_s = 86400.0;
};

inline double fspl_db(double freq_ghz, double distance_km) {
    if (distance_km <= 0.0 || freq_ghz <= 0.0)
        throw std::invalid_argument("fspl requires positive distance and frequency");
    const double d_m = distance_km * 1e3;
    const double f_hz = freq_ghz * 1e9;
    return 20.0 * std::log10(4.0 * std::numbers::pi * d_m * f_hz / 299792458.0);
}

// Link budget: EIRP + G/T - FSPL - k_B - bandwidth, with k_B = -228.6 dBW/K/Hz.
inline double snr_db(const RadioProfile& p, double distance_km) {
    const double b_hz = p.bandwidth_per_link_mhz * 1e6;
    return (p.tx_power_dbm - 30.0) + p.tx_gain_dbi - fspl_db(p.carrier_ghz, distance_km) +
           p.gt_db_per_k + 228.6 - 10.0 * std::log10(b_hz);
}

inline double shannon_throughput_bps(const RadioProfile& p, double distance_km) {
    const double snr_lin = std::pow(10.0, snr_db(p, distance_km) / 10.0);
    return p.bandwidth_per_link_mhz * 1e6 * std::log2(1.0 + snr_lin);
}

struct LinkMetrics {
    double delay_s = 0.0;      // propagation + transmission
    double throughput_bps = 0.0;
    double lifetime_s = 0.0;
};

namespace detail {

// Orbital-neighbor test for ISLs: ids of the form sat_<plane>_<index>.
// Neighbors are the adjacent slots in the same plane (cyclic) and the same
// slot in an adjacent plane. Non-conforming ids fall back to permissive.
inline bool isl_adjacent(const std::string& ia, const std::string& ib, int n_planes = 6,
                         int per_plane = 11) {
    auto parse = [](const std::string& id, int& p, int& s) {
        if (id.rfind("sat_", 0) != 0) return false;
        const auto us = id.find('_', 4);
        if (us == std::string::npos) return false;
        try {
            p = std::stoi(id.substr(4, us - 4));
            s = std::stoi(id.substr(us + 1));
        } catch (...) {
            return false;
        }
        return true;
    };
    int pa, sa, pb, sb;
    if (!parse(ia, pa, sa) || !parse(ib, pb, sb)) return true;
    if (pa == pb) {
        const int d = std::abs(sa - sb);
        return d == 1 || d == per_plane - 1;
    }
    if (sa == sb) return std::abs(pa - pb) == 1; // Walker star: no seam crosslink
    return false;
}

} // namespace detail

// Geometric existence test for a link at one instant: horizon visibility
// plus class-specific reach limits.
inline bool link_exists(NodeKind ka, const Kinematics& a, const std::string& ida, NodeKind kb,
                        const Kinematics& b, const std::string& idb,
                        const LinkBudgetConfig& cfg = {}) {
    const auto cls = classify(ka, kb);
    if (!cls) return false;
    if (!visible(a.pos, b.pos)) return false;
    if (*cls == LinkClass::S2A || *cls == LinkClass::S2G) {
        if (slant_distance(a.pos, b.pos) > cfg.footprint_slant_km) return false;
    }
    if (*cls == LinkClass::A2G &&
        (ka == NodeKind::base_station || kb == NodeKind::base_station)) {
        if (ground_distance(a.pos, b.pos) > cfg.bs_coverage_km) return false;
    }
    if (*cls == LinkClass::ISL && !detail::isl_adjacent(ida, idb)) return false;
    return true;
}

// Remaining visibility duration from t: coarse forward scan at step_s, then
// bisection to <= 1 s. Returns the horizon cap when no loss is observed or a
// trace ends first.
inline double link_lifetime(const Scenario&, const NodeTrace& ta, const NodeTrace& tb,
                            double t, double step_s = 10.0, double horizon_s = 86400.0,
                            const LinkBudgetConfig& cfg = {}) {
    auto alive_and_linked = [&](double tt) -> int {
        auto a = position_at(ta, tt);
        auto b = position_at(tb, tt);
        if (!a || !b) return -1; // trace ended
        return link_exists(ta.kind, *a, ta.id, tb.kind, *b, tb.id, cfg) ? 1 : 0;
    };
    double lo = t;
    double hi = t;
    bool lost = false;
    for (double tt = t + step_s; tt <= t + horizon_s + 1e-9; tt += step_s) {
        const int st = alive_and_linked(tt);
        if (st == -1) return horizon_s;
        if (st == 0) {
            lo = tt - step_s;
            hi = tt;
            lost = true;
            break;
        }
        lo = tt;
    }
    if (!lost) return horizon_s;
    while (hi - lo > 1.0) {
        const double mid = 0.5 * (lo + hi);
        const int st = alive_and_linked(mid);
        if (st == -1) return horizon_s;
        (st == 1 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi) - t;
}

// Full metric triple for transmitter a -> receiver b at time t; empty when
// the link does not exist.
inline std::optional<LinkMetrics> link_metrics(const Scenario& sc, const std::string& id_a,
                                               const std::string& id_b, double t,
                                               const LinkBudgetConfig& cfg = {}) {
    const NodeTrace* ta = sc.find(id_a);
    const NodeTrace* tb = sc.find(id_b);
    if (!ta || !tb) throw std::invalid_argument("unknown node id");
    auto a = position_at(*ta, t);
    auto b = position_at(*tb, t);
    if (!a || !b) return std::nullopt;
    if (!link_exists(ta->kind, *a, ta->id, tb->kind, *b, tb->id, cfg)) return std::nullopt;

    const RadioProfile& prof = cfg.radios.select(ta->kind, tb->kind);
    const double d = slant_distance(a->pos, b->pos);
    LinkMetrics m;
    if (d <= 0.0) {
        // co-located endpoints: treat as a near-zero-range link
        m.throughput_bps = shannon_throughput_bps(prof, 1e-3);
        m.delay_s = cfg.packet_bits / m.throughput_bps;
    } else {
        m.throughput_bps = shannon_throughput_bps(prof, d);
        m.delay_s = d / kSpeedOfLightKmS + cfg.packet_bits / m.throughput_bps;
    }
    m.lifetime_s = link_lifetime(sc, *ta, *tb, t, 10.0, cfg.lifetime_horizon_s, cfg);
    return m;
}

} // namespace sagin
