#pragma once

// Experiment orchestration: config schema, synthetic scenario generation,
// hypervolume indicator, and the evaluation pipeline comparing learned
// distributed routing against the exact Pareto front per layer mask.

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "sagin/distributed.hpp"

namespace sagin {

// ---- 3-D hypervolume (minimize delay, maximize throughput and lifetime) --

// Volume of objective space dominated by `points` relative to `reference`
// (the worst corner). Points not better than the reference contribute
// nothing. Slicing on the lifetime axis with a 2-D sweep per slab.
inline double hypervolume(const std::vector<MetricTriple>& points, const MetricTriple& ref) {
    struct P {
        double a, b, c; // gains over the reference, all maximized
    };
    std::vector<P> ps;
    for (const auto& t : points) {
        P p{ref.delay_s - t.delay_s, t.throughput_bps - ref.throughput_bps,
            t.lifetime_s - ref.lifetime_s};
        if (p.a > 0.0 && p.b > 0.0 && p.c > 0.0) ps.push_back(p);
    }
    if (ps.empty()) return 0.0;
    std::vector<double> levels;
    for (const auto& p : ps) levels.push_back(p.c);
    std::sort(levels.begin(), levels.end(), std::greater<>());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    levels.push_back(0.0);

    auto hv2d = [&](double zmin) {
        std::vector<std::pair<double, double>> rect; // (a, b)
        for (const auto& p : ps)
            if (p.c >= zmin) rect.push_back({p.a, p.b});
        std::sort(rect.begin(), rect.end(), [](auto& x, auto& y) { return x.first > y.first; });
        double area = 0.0, prev_b = 0.0, prev_a = 0.0;
        // sweep from widest a; accumulate strips where b increases
        for (const auto& [a, b] : rect) {
            if (b > prev_b) {
                area += (b - prev_b) * a;
                prev_b = b;
            }
            prev_a = a;
        }
        (void)prev_a;
        return area;
    };

    double vol = 0.0;
    for (std::size_t i = 0; i + 1 < levels.size(); ++i)
        vol += hv2d(levels[i]) * (levels[i] - levels[i + 1]);
    return vol;
}

// ---- Experiment configuration -------------------------------------------

struct GsSite {
    std::string id;
    double lat_deg, lon_deg;
};

struct ExperimentConfig {
    int schema_version = 1;

    // scenario generation
    std::uint64_t base_seed = 1;
    int n_flights = 40;
    int n_ships = 20;
    double duration_s = 21600.0;
    ShipBox ship_box;
    std::vector<GsSite> gs_sites{{"gs_0", 50.90, -1.40}}; // Southampton port
    double shift_sigma_s = 1800.0;
    std::uint64_t train_shift_seed = 11;
    std::uint64_t test_shift_seed = 22;
    std::string destination_id = "gs_0";

    // time window / snapshots
    double t_start = 0.0;
    double t_stop = 21600.0;
    double snapshot_step_s = 600.0;

    // queuing
    QueuingModel train_queuing = QueuingModel::constant(0.010);
    QueuingModel test_queuing = QueuingModel::trunc_gauss(0.010, 0.005, 7);

    // link model
    LinkBudgetConfig link;

    // eps sweep
    double eps_c_max_mbps = 70.0, eps_c_step_mbps = 5.0;
    double eps_l_max_min = 30.0, eps_l_step_min = 5.0;
    int eps_samples_per_snapshot = 6;

    double lambda = 10.0;
    RolloutMode rollout_mode = RolloutMode::mo;

    TrainConfig train_cfg;
    std::uint64_t dataset_seed = 5;

    int eval_n_pairs = 24;
    double eval_pair_step_s = 1200.0;

    std::string output_dir = "out";
    std::string model_path; // default <output_dir>/model.json

    std::vector<EpsConstraint> eps_grid() const {
        std::vector<EpsConstraint> g;
        for (double c = 0.0; c <= eps_c_max_mbps + 1e-9; c += eps_c_step_mbps)
            for (double l = 0.0; l <= eps_l_max_min + 1e-9; l += eps_l_step_min)
                g.push_back({c * 1e6, l * 60.0});
        return g;
    }

    std::string model_file() const {
        return model_path.empty() ? output_dir + "/model.json" : model_path;
    }
    std::string train_base() const { return output_dir + "/scenario_train"; }
    std::string test_base() const { return output_dir + "/scenario_test"; }
};

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config: " + path);
    nlohmann::json j = nlohmann::json::parse(f);
    if (j.value("schema_version", 0) != 1)
        throw std::runtime_error("unsupported config schema_version");
    ExperimentConfig c;
    auto sc = j.value("scenario", nlohmann::json::object());
    c.base_seed = sc.value("base_seed", c.base_seed);
    c.n_flights = sc.value("n_flights", c.n_flights);
    c.n_ships = sc.value("n_ships", c.n_ships);
    c.duration_s = sc.value("duration_s", c.duration_s);
    c.shift_sigma_s = sc.value("shift_sigma_s", c.shift_sigma_s);
    c.train_shift_seed = sc.value("train_shift_seed", c.train_shift_seed);
    c.test_shift_seed = sc.value("test_shift_seed", c.test_shift_seed);
    if (sc.contains("ship_box")) {
        auto b = sc["ship_box"];
        c.ship_box = ShipBox{b.value("lat_min", 40.0), b.value("lat_max", 55.0),
                             b.value("lon_min", -50.0), b.value("lon_max", -10.0)};
    }
    if (sc.contains("gs")) {
        c.gs_sites.clear();
        for (auto& g : sc["gs"])
            c.gs_sites.push_back({g.at("id").get<std::string>(), g.at("lat").get<double>(),
                                  g.at("lon").get<double>()});
    }
    c.destination_id = sc.value("destination_id", c.destination_id);

    auto tm = j.value("time", nlohmann::json::object());
    c.t_start = tm.value("start_s", c.t_start);
    c.t_stop = tm.value("stop_s", std::min(c.duration_s, c.t_stop));
    c.snapshot_step_s = tm.value("snapshot_step_s", c.snapshot_step_s);
    if (!(c.t_stop > c.t_start) || c.snapshot_step_s <= 0)
        throw std::runtime_error("invalid time window in config");

    auto q = j.value("queuing", nlohmann::json::object());
    c.test_queuing = QueuingModel::trunc_gauss(q.value("mean_s", 0.010),
                                               q.value("std_s", 0.005),
                                               q.value("seed", std::uint64_t{7}));
    if (q.value("variant", "trunc_gauss") == "constant")
        c.test_queuing = QueuingModel::constant(q.value("mean_s", 0.010));

    auto lk = j.value("link", nlohmann::json::object());
    c.link.lifetime_horizon_s = lk.value("lifetime_horizon_s", 3600.0);
    c.link.packet_bits = lk.value("packet_bits", 8192.0);
    c.link.footprint_slant_km = lk.value("footprint_slant_km", 2300.0);

    auto eg = j.value("eps_grid", nlohmann::json::object());
    c.eps_c_max_mbps = eg.value("c_max_mbps", c.eps_c_max_mbps);
    c.eps_c_step_mbps = eg.value("c_step_mbps", c.eps_c_step_mbps);
    c.eps_l_max_min = eg.value("l_max_min", c.eps_l_max_min);
    c.eps_l_step_min = eg.value("l_step_min", c.eps_l_step_min);
    c.eps_samples_per_snapshot = j.value("eps_samples_per_snapshot", c.eps_samples_per_snapshot);
    if (c.eps_c_step_mbps <= 0 || c.eps_l_step_min <= 0)
        throw std::runtime_error("eps grid steps must be positive");

    c.lambda = j.value("lambda", c.lambda);
    const std::string mode = j.value("rollout_mode", "mo");
    c.rollout_mode = mode == "so"             ? RolloutMode::so
                     : mode == "mo_recursive" ? RolloutMode::mo_recursive
                                              : RolloutMode::mo;

    auto tr = j.value("train", nlohmann::json::object());
    c.train_cfg.lr = tr.value("lr", 1e-3);
    c.train_cfg.batch_size = tr.value("batch_size", 1000);
    c.train_cfg.epochs = tr.value("epochs", 120);
    c.train_cfg.seed = tr.value("seed", std::uint64_t{3});
    c.dataset_seed = j.value("dataset_seed", c.dataset_seed);

    auto ev = j.value("eval", nlohmann::json::object());
    c.eval_n_pairs = ev.value("n_pairs", c.eval_n_pairs);
    c.eval_pair_step_s = ev.value("pair_step_s", c.eval_pair_step_s);

    c.output_dir = j.value("output_dir", c.output_dir);
    c.model_path = j.value("model_path", c.model_path);
    return c;
}

// ---- Scenario generation -------------------------------------------------

// Default transatlantic airport pairs (west, east).
inline const std::vector<std::pair<GeoPos, GeoPos>>& default_airport_pairs() {
    static const std::vector<std::pair<GeoPos, GeoPos>> pairs = {
        {{40.64, -73.78, 0.0}, {51.47, -0.46, 0.0}},  // JFK-LHR
        {{42.36, -71.01, 0.0}, {49.01, 2.55, 0.0}},   // BOS-CDG
        {{43.68, -79.63, 0.0}, {52.31, 4.76, 0.0}},   // YYZ-AMS
        {{40.69, -74.17, 0.0}, {53.43, -6.24, 0.0}},  // EWR-DUB
        {{45.47, -73.74, 0.0}, {50.03, 8.55, 0.0}},   // YUL-FRA
        {{38.95, -77.45, 0.0}, {51.47, -0.46, 0.0}},  // IAD-LHR
        {{41.98, -87.90, 0.0}, {52.31, 4.76, 0.0}},   // ORD-AMS
        {{44.88, -63.51, 0.0}, {51.47, -0.46, 0.0}},  // YHZ-LHR
    };
    return pairs;
}

// Base scenario: full constellation, staggered transatlantic flights in
// both directions, slow ships in the box, static ground stations.
inline Scenario generate_base_scenario(const ExperimentConfig& cfg) {
    Scenario sc;
    sc.epoch = "2018-06-29T00:00:00Z";
    sc.duration_s = cfg.duration_s;
    sc.destination_id = cfg.destination_id;

    ConstellationParams cp;
    for (auto& tr : propagate_constellation(cp, sc.epoch, cfg.duration_s, 60.0))
        sc.traces.push_back(std::move(tr));

    std::mt19937_64 rng(cfg.base_seed);
    const auto& pairs = default_airport_pairs();
    std::uniform_int_distribution<std::size_t> upair(0, pairs.size() - 1);
    std::uniform_real_distribution<double> udep(-18000.0, cfg.duration_s);
    std::bernoulli_distribution eastbound(0.5);
    std::vector<FlightRoute> routes;
    for (int i = 0; i < cfg.n_flights; ++i) {
        auto [west, east] = pairs[upair(rng)];
        FlightRoute r;
        if (eastbound(rng)) {
            r.origin = west;
            r.dest = east;
        } else {
            r.origin = east;
            r.dest = west;
        }
        r.departure_t = udep(rng);
        routes.push_back(r);
    }
    for (auto& tr : synth_flights(routes)) sc.traces.push_back(std::move(tr));

    for (auto& tr : synth_ships(cfg.n_ships, cfg.ship_box, cfg.duration_s, cfg.base_seed + 101,
                                60.0))
        sc.traces.push_back(std::move(tr));

    for (const auto& g : cfg.gs_sites) {
        NodeTrace tr;
        tr.id = g.id;
        tr.kind = NodeKind::ground_station;
        const GeoPos p = make_geo(g.lat_deg, g.lon_deg, 0.0);
        tr.records.push_back({0.0, p, 0.0, 0.0});
        tr.records.push_back({cfg.duration_s, p, 0.0, 0.0});
        sc.traces.push_back(std::move(tr));
    }
    return sc;
}

inline std::pair<Scenario, Scenario> generate_train_test(const ExperimentConfig& cfg) {
    Scenario base = generate_base_scenario(cfg);
    Scenario train = base, test = base;
    train.traces = time_shift_augment(base.traces, cfg.shift_sigma_s, cfg.train_shift_seed);
    test.traces = time_shift_augment(base.traces, cfg.shift_sigma_s, cfg.test_shift_seed);
    return {std::move(train), std::move(test)};
}

// ---- Evaluation ----------------------------------------------------------

struct LayerStats {
    double coverage = 0.0;            // covered ships / ships
    double mean_min_delay_s = 0.0;    // over covered ships
    double mean_max_tp_covered = 0.0; // best bottleneck throughput, covered ships
    double mean_max_tp_all = 0.0;     // zeros included for uncovered ships
    double mean_max_life_covered = 0.0;
    double mean_max_life_all = 0.0;
};

struct PairReport {
    std::string src;
    double t = 0.0;
    double hv_exact = 0.0;
    double hv_dl = 0.0;
    double hv_ratio = 0.0;
    double near_fraction = 0.0; // delivered routes within 10% of a front point
    int n_front = 0;
    int n_dl_routes = 0;
    int n_delivered = 0;
    int n_rollouts = 0;
    int constraint_misses = 0; // feasible eps where the DL route violates it
    int front_misses = 0;      // DL triples not weakly dominated by the front
};

struct EvalReport {
    // layer name -> timestamp -> stats
    std::map<std::string, std::map<double, LayerStats>> layers;
    std::vector<PairReport> pairs;
    double mean_hv_ratio = 0.0;
    double mean_near_fraction = 0.0;
    double delivery_ratio = 0.0;
    bool coverage_monotone = true;
    bool delay_monotone = true;
    bool fronts_nondominated = true;
};

namespace detail {

inline std::vector<double> reverse_max_bottleneck_throughput(const Snapshot& snap, int dst) {
    const int n = static_cast<int>(snap.nodes.size());
    std::vector<double> best(n, -1.0);
    using QE = std::pair<double, int>;
    std::priority_queue<QE> pq;
    best[dst] = kCapThroughputBps;
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
            if (!m || settled[i]) continue;
            const double nw = std::min(w, m->throughput_bps);
            if (nw > best[i]) {
                best[i] = nw;
                pq.push({nw, i});
            }
        }
    }
    return best;
}

} // namespace detail

inline unsigned layer_mask_of(const std::string& name) {
    if (name == "aanet") return layer_aanet | layer_ground;
    if (name == "leo") return layer_leo | layer_ground;
    if (name == "integrated") return layer_all;
    throw std::invalid_argument("unknown layer mask: " + name);
}

// Per-layer connectivity statistics at one timestamp: one reverse min-delay
// run plus two reverse widest-path runs give every ship's best values.
inline LayerStats layer_stats(const Scenario& sc, double t, unsigned mask,
                              const QueuingModel& queuing, const LinkBudgetConfig& lcfg,
                              const std::string& dst) {
    Snapshot snap = build_snapshot(sc, t, mask, queuing, lcfg);
    LayerStats st;
    if (!snap.index.count(dst)) return st;
    const int d = snap.require(dst);
    auto rl = detail::reverse_min_delay(snap, d, [](const LinkMetrics&) { return true; });
    auto tp = detail::reverse_max_bottleneck_throughput(snap, d);
    auto lf = detail::reverse_max_bottleneck_lifetime(snap, d,
                                                      [](const LinkMetrics&) { return true; });
    int ships = 0, covered = 0;
    double sum_delay = 0, sum_tp_cov = 0, sum_tp_all = 0, sum_lf_cov = 0, sum_lf_all = 0;
    for (int i = 0; i < static_cast<int>(snap.nodes.size()); ++i) {
        if (snap.nodes[i].kind != NodeKind::ship) continue;
        ++ships;
        if (std::isfinite(rl.dist[i])) {
            ++covered;
            sum_delay += rl.dist[i];
            sum_tp_cov += tp[i];
            sum_tp_all += tp[i];
            sum_lf_cov += lf[i];
            sum_lf_all += lf[i];
        }
        // uncovered ships contribute zeros to the "_all" means
    }
    if (ships > 0) st.coverage = static_cast<double>(covered) / ships;
    if (covered > 0) {
        st.mean_min_delay_s = sum_delay / covered;
        st.mean_max_tp_covered = sum_tp_cov / covered;
        st.mean_max_life_covered = sum_lf_cov / covered;
    }
    if (ships > 0) {
        st.mean_max_tp_all = sum_tp_all / ships;
        st.mean_max_life_all = sum_lf_all / ships;
    }
    return st;
}

// Max-norm distance to the nearest front point, normalized per objective by
// the front's own range (unit guards for degenerate ranges).
inline double normalized_front_distance(const MetricTriple& r,
                                        const std::vector<MetricTriple>& front) {
    if (front.empty()) return std::numeric_limits<double>::infinity();
    double dmin = std::numeric_limits<double>::infinity(), dmax = 0;
    double cmin = std::numeric_limits<double>::infinity(), cmax = 0;
    double lmin = std::numeric_limits<double>::infinity(), lmax = 0;
    for (const auto& p : front) {
        dmin = std::min(dmin, p.delay_s);
        dmax = std::max(dmax, p.delay_s);
        cmin = std::min(cmin, p.throughput_bps);
        cmax = std::max(cmax, p.throughput_bps);
        lmin = std::min(lmin, p.lifetime_s);
        lmax = std::max(lmax, p.lifetime_s);
    }
    const double rd = std::max(dmax - dmin, std::max(dmax, 1e-6));
    const double rc = std::max(cmax - cmin, std::max(cmax, 1.0));
    const double rl2 = std::max(lmax - lmin, std::max(lmax, 1.0));
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : front) {
        // shortfall only: beating a front coordinate costs nothing
        const double dd = std::max(r.delay_s - p.delay_s, 0.0) / rd;
        const double dc = std::max(p.throughput_bps - r.throughput_bps, 0.0) / rc;
        const double dl = std::max(p.lifetime_s - r.lifetime_s, 0.0) / rl2;
        best = std::min(best, std::max({dd, dc, dl}));
    }
    return best;
}

inline EvalReport evaluate(const Scenario& test, const ExperimentConfig& cfg,
                           const Mlp& model) {
    EvalReport rep;
    const std::string& dst = cfg.destination_id;
    const auto grid = cfg.eps_grid();
    const std::vector<std::string> layer_names{"aanet", "leo", "integrated"};

    for (double t = cfg.t_start; t <= cfg.t_stop + 1e-9; t += cfg.snapshot_step_s)
        for (const auto& name : layer_names)
            rep.layers[name][t] =
                layer_stats(test, t, layer_mask_of(name), cfg.test_queuing, cfg.link, dst);

    // structural monotonicity over the layer masks
    for (const auto& [t, st] : rep.layers["integrated"]) {
        const auto& a = rep.layers["aanet"][t];
        const auto& l = rep.layers["leo"][t];
        if (st.coverage + 1e-12 < std::max(a.coverage, l.coverage))
            rep.coverage_monotone = false;
    }

    Estimator est = mlp_estimator(model);
    double sum_ratio = 0, sum_near = 0;
    int n_pairs = 0;
    long delivered = 0, attempts = 0;
    for (double t = cfg.t_start; t <= cfg.t_stop + 1e-9 && n_pairs < cfg.eval_n_pairs;
         t += cfg.eval_pair_step_s) {
        Snapshot snap = build_snapshot(test, t, layer_all, cfg.test_queuing, cfg.link);
        if (!snap.index.count(dst)) continue;
        // per-layer min-delay comparison for the delay-monotonicity check
        Snapshot snap_a = build_snapshot(test, t, layer_mask_of("aanet"), cfg.test_queuing,
                                         cfg.link);
        Snapshot snap_l = build_snapshot(test, t, layer_mask_of("leo"), cfg.test_queuing,
                                         cfg.link);
        for (const auto& node : snap.nodes) {
            if (n_pairs >= cfg.eval_n_pairs) break;
            if (node.kind != NodeKind::ship) continue;
            auto exact0 = min_delay_path(snap, node.id, dst);
            if (!exact0.ok()) continue; // uncovered at t

            for (const Snapshot* sub : {&snap_a, &snap_l}) {
                if (!sub->index.count(node.id) || !sub->index.count(dst)) continue;
                auto r = min_delay_path(*sub, node.id, dst);
                if (r.ok() && exact0.path.delay_s > r.path.delay_s + 1e-9)
                    rep.delay_monotone = false;
            }

            auto front = pareto_front(snap, node.id, dst, grid);
            std::vector<MetricTriple> front_triples;
            for (auto& [p, tr] : front) front_triples.push_back(tr);
            for (std::size_t i = 0; i < front_triples.size(); ++i)
                for (std::size_t j = 0; j < front_triples.size(); ++j)
                    if (i != j && dominates(front_triples[i], front_triples[j]))
                        rep.fronts_nondominated = false;

            PairReport pr;
            pr.src = node.id;
            pr.t = t;
            pr.n_front = static_cast<int>(front_triples.size());

            std::vector<MetricTriple> dl_triples;
            for (const auto& eps : grid) {
                ++attempts;
                ++pr.n_rollouts;
                auto rr = rollout(snap, node.id, dst, eps, est, cfg.rollout_mode, cfg.lambda);
                if (!rr.delivered) continue;
                ++delivered;
                ++pr.n_delivered;
                const MetricTriple tr = triple_of(rr.path);
                auto ex = constrained_min_delay(snap, node.id, dst, eps);
                if (ex.ok() && !(tr.throughput_bps > eps.eps_c_bps &&
                                 tr.lifetime_s > eps.eps_l_s))
                    ++pr.constraint_misses;
                bool dup = false;
                for (const auto& q : dl_triples)
                    if (q.delay_s == tr.delay_s && q.throughput_bps == tr.throughput_bps &&
                        q.lifetime_s == tr.lifetime_s)
                        dup = true;
                if (!dup) dl_triples.push_back(tr);
            }
            pr.n_dl_routes = static_cast<int>(dl_triples.size());

            // reference point: worst observed coordinate over front + DL set
            MetricTriple ref{0.0, std::numeric_limits<double>::infinity(),
                             std::numeric_limits<double>::infinity()};
            auto absorb = [&](const MetricTriple& q) {
                ref.delay_s = std::max(ref.delay_s, q.delay_s);
                ref.throughput_bps = std::min(ref.throughput_bps, q.throughput_bps);
                ref.lifetime_s = std::min(ref.lifetime_s, q.lifetime_s);
            };
            for (const auto& q : front_triples) absorb(q);
            for (const auto& q : dl_triples) absorb(q);
            // nudge so the worst point still has positive volume
            ref.delay_s *= 1.1;
            ref.throughput_bps *= 0.9;
            ref.lifetime_s *= 0.9;

            pr.hv_exact = hypervolume(front_triples, ref);
            pr.hv_dl = hypervolume(dl_triples, ref);
            pr.hv_ratio = pr.hv_exact > 0 ? pr.hv_dl / pr.hv_exact : 0.0;

            int near = 0;
            for (const auto& q : dl_triples) {
                if (normalized_front_distance(q, front_triples) <= 0.10) ++near;
                bool dominated_or_equal = false;
                for (const auto& p : front_triples)
                    if (dominates(p, q) ||
                        (p.delay_s == q.delay_s && p.throughput_bps == q.throughput_bps &&
                         p.lifetime_s == q.lifetime_s))
                        dominated_or_equal = true;
                if (!dominated_or_equal) ++pr.front_misses;
            }
            pr.near_fraction = dl_triples.empty()
                                   ? 0.0
                                   : static_cast<double>(near) / dl_triples.size();

            sum_ratio += pr.hv_ratio;
            sum_near += pr.near_fraction;
            ++n_pairs;
            rep.pairs.push_back(std::move(pr));
        }
    }
    if (n_pairs > 0) {
        rep.mean_hv_ratio = sum_ratio / n_pairs;
        rep.mean_near_fraction = sum_near / n_pairs;
    }
    rep.delivery_ratio = attempts > 0 ? static_cast<double>(delivered) / attempts : 0.0;
    return rep;
}

inline nlohmann::json report_to_json(const EvalReport& rep) {
    nlohmann::json j;
    j["summary"] = {{"mean_hv_ratio", rep.mean_hv_ratio},
                    {"mean_near_fraction", rep.mean_near_fraction},
                    {"delivery_ratio", rep.delivery_ratio},
                    {"coverage_monotone", rep.coverage_monotone},
                    {"delay_monotone", rep.delay_monotone},
                    {"fronts_nondominated", rep.fronts_nondominated},
                    {"n_pairs", rep.pairs.size()}};
    for (const auto& [name, per_t] : rep.layers) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [t, st] : per_t)
            arr.push_back({{"t", t},
                           {"coverage", st.coverage},
                           {"mean_min_delay_s", st.mean_min_delay_s},
                           {"mean_max_throughput_covered_bps", st.mean_max_tp_covered},
                           {"mean_max_throughput_all_bps", st.mean_max_tp_all},
                           {"mean_max_lifetime_covered_s", st.mean_max_life_covered},
                           {"mean_max_lifetime_all_s", st.mean_max_life_all}});
        j["layers"][name] = arr;
    }
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : rep.pairs)
        pairs.push_back({{"src", p.src},
                         {"t", p.t},
                         {"hv_exact", p.hv_exact},
                         {"hv_dl", p.hv_dl},
                         {"hv_ratio", p.hv_ratio},
                         {"near_fraction", p.near_fraction},
                         {"n_front", p.n_front},
                         {"n_dl_routes", p.n_dl_routes},
                         {"n_delivered", p.n_delivered},
                         {"n_rollouts", p.n_rollouts},
                         {"constraint_misses", p.constraint_misses},
                         {"front_misses", p.front_misses}});
    j["pairs"] = pairs;
    return j;
}

} // namespace sagin
