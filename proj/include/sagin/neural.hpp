#pragma once

// Three-hidden-layer feedforward estimator for constrained route metrics:
// shared 300-300 trunk, three 100-wide branches with one linear head each
// (delay / throughput / lifetime). Batch normalization on every hidden
// layer, ReLU activations, Adam training. Linear algebra via Eigen; the
// forward/backward/optimizer logic is implemented here.

#include <array>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sagin/routing_exact.hpp"

namespace sagin {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kBnEps = 1e-8;
inline constexpr int kFeatureDim = 23; // 3 nodes x 7 kinematics + 2 thresholds

struct Standardizer {
    VectorXd mean;
    VectorXd std; // entries clamped away from zero

    void fit(const MatrixXd& x) { // samples as columns
        mean = x.rowwise().mean();
        MatrixXd c = x.colwise() - mean;
        std = (c.array().square().rowwise().mean()).sqrt().matrix();
        for (int i = 0; i < std.size(); ++i)
            if (std(i) < 1e-12) std(i) = 1.0;
    }
    MatrixXd transform(const MatrixXd& x) const {
        return ((x.colwise() - mean).array().colwise() / std.array()).matrix();
    }
    MatrixXd inverse(const MatrixXd& z) const {
        return ((z.array().colwise() * std.array()).matrix().colwise() + mean);
    }
};

struct DenseBn {
    MatrixXd W;
    VectorXd b;
    VectorXd gamma, beta;
    VectorXd run_mean, run_var; // eval-mode moments

    void init(int out, int in, std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const double scale = std::sqrt(6.0 / in); // fan-in scaled for ReLU
        W = MatrixXd::NullaryExpr(out, in, [&]() { return u(rng) * scale; });
        b = VectorXd::Zero(out);
        gamma = VectorXd::Ones(out);
        beta = VectorXd::Zero(out);
        run_mean = VectorXd::Zero(out);
        run_var = VectorXd::Ones(out);
    }
};

struct Head {
    MatrixXd W; // 1 x branch
    VectorXd b; // 1

    void init(int in, std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const double scale = std::sqrt(6.0 / in);
        W = MatrixXd::NullaryExpr(1, in, [&]() { return u(rng) * scale; });
        b = VectorXd::Zero(1);
    }
};

struct MlpWidths {
    int input = kFeatureDim;
    int h1 = 300;
    int h2 = 300;
    int branch = 100;
};

struct Mlp {
    MlpWidths widths;
    DenseBn l1, l2;
    std::array<DenseBn, 3> br;
    std::array<Head, 3> head;
    Standardizer fstd, lstd;
    nlohmann::json meta; // training eps-grid etc.

    static Mlp make(const MlpWidths& w, std::uint64_t seed) {
        Mlp m;
        m.widths = w;
        std::mt19937_64 rng(seed);
        m.l1.init(w.h1, w.input, rng);
        m.l2.init(w.h2, w.h1, rng);
        for (auto& b : m.br) b.init(w.branch, w.h2, rng);
        for (auto& h : m.head) h.init(w.branch, rng);
        return m;
    }
};

// All trainable parameters in a fixed order (weights, biases, BN scale and
// shift); running moments are state, not parameters.
struct ParamRef {
    double* data;
    long size;
};

inline std::vector<ParamRef> param_refs(Mlp& m) {
    std::vector<ParamRef> out;
    auto addm = [&](MatrixXd& x) { out.push_back({x.data(), x.size()}); };
    auto addv = [&](VectorXd& x) { out.push_back({x.data(), x.size()}); };
    auto layer = [&](DenseBn& l) {
        addm(l.W);
        addv(l.b);
        addv(l.gamma);
        addv(l.beta);
    };
    layer(m.l1);
    layer(m.l2);
    for (auto& b : m.br) layer(b);
    for (auto& h : m.head) {
        addm(h.W);
        addv(h.b);
    }
    return out;
}

// Gradients mirror the parameter layout.
struct MlpGrads {
    std::vector<MatrixXd> g; // flattened per ParamRef, stored as size x 1

    static MlpGrads zeros_like(Mlp& m) {
        MlpGrads out;
        for (auto& p : param_refs(m)) out.g.emplace_back(MatrixXd::Zero(p.size, 1));
        return out;
    }
};

enum class RunMode { train, eval };

namespace nn_detail {

struct BnCache {
    MatrixXd xhat;
    VectorXd mu, var; // batch statistics
};

// y = gamma .* xhat + beta, with xhat from batch stats (train) or running
// moments (eval).
inline MatrixXd bn_forward(const DenseBn& l, const MatrixXd& z, RunMode mode, BnCache* cache) {
    const long n = z.cols();
    VectorXd mu, var;
    if (mode == RunMode::train) {
        mu = z.rowwise().mean();
        MatrixXd c = z.colwise() - mu;
        var = c.array().square().rowwise().mean();
    } else {
        mu = l.run_mean;
        var = l.run_var;
    }
    MatrixXd xhat =
        ((z.colwise() - mu).array().colwise() / (var.array() + kBnEps).sqrt()).matrix();
    MatrixXd y = (xhat.array().colwise() * l.gamma.array()).matrix().colwise() + l.beta;
    if (cache) {
        cache->xhat = xhat;
        cache->mu = mu;
        cache->var = var;
    }
    (void)n;
    return y;
}

// dL/dz through batch normalization (train-mode batch statistics).
inline MatrixXd bn_backward(const DenseBn& l, const BnCache& c, const MatrixXd& dy,
                            VectorXd& dgamma, VectorXd& dbeta) {
    dgamma = (dy.array() * c.xhat.array()).rowwise().sum().matrix();
    dbeta = dy.rowwise().sum();
    VectorXd inv_sigma = (c.var.array() + kBnEps).rsqrt().matrix();
    VectorXd mean_dy = dy.rowwise().mean();
    VectorXd mean_dyxhat = (dy.array() * c.xhat.array()).rowwise().mean().matrix();
    MatrixXd t = ((dy.colwise() - mean_dy).array() -
                  (c.xhat.array().colwise() * mean_dyxhat.array()))
                     .matrix();
    VectorXd scale = (l.gamma.array() * inv_sigma.array()).matrix();
    return (t.array().colwise() * scale.array()).matrix();
}

struct LayerCache {
    MatrixXd x;    // input
    MatrixXd z;    // pre-BN
    BnCache bn;
    MatrixXd bn_out;
    MatrixXd a;    // post-ReLU
};

inline MatrixXd layer_forward(const DenseBn& l, const MatrixXd& x, RunMode mode,
                              LayerCache* cache) {
    MatrixXd z = (l.W * x).colwise() + l.b;
    BnCache bc;
    MatrixXd y = bn_forward(l, z, mode, cache ? &bc : nullptr);
    MatrixXd a = y.cwiseMax(0.0);
    if (cache) {
        cache->x = x;
        cache->z = std::move(z);
        cache->bn = std::move(bc);
        cache->bn_out = y;
        cache->a = a;
    }
    return a;
}

// Returns dL/dx and accumulates this layer's parameter gradients.
inline MatrixXd layer_backward(const DenseBn& l, const LayerCache& c, const MatrixXd& da,
                               MatrixXd& dW, VectorXd& db, VectorXd& dgamma, VectorXd& dbeta) {
    MatrixXd dy = (c.bn_out.array() > 0.0).select(da, 0.0);
    MatrixXd dz = bn_backward(l, c.bn, dy, dgamma, dbeta);
    dW = dz * c.x.transpose();
    db = dz.rowwise().sum();
    return l.W.transpose() * dz;
}

struct ForwardCache {
    LayerCache c1, c2;
    std::array<LayerCache, 3> cb;
};

} // namespace nn_detail

// Forward pass on a standardized feature batch (columns = samples); output
// is the 3 x N standardized label estimate. Eval mode is deterministic.
inline MatrixXd forward(const Mlp& m, const MatrixXd& x, RunMode mode,
                        nn_detail::ForwardCache* cache = nullptr) {
    if (x.rows() != m.widths.input) throw std::invalid_argument("feature dimension mismatch");
    using namespace nn_detail;
    MatrixXd a1 = layer_forward(m.l1, x, mode, cache ? &cache->c1 : nullptr);
    MatrixXd a2 = layer_forward(m.l2, a1, mode, cache ? &cache->c2 : nullptr);
    MatrixXd y(3, x.cols());
    for (int k = 0; k < 3; ++k) {
        MatrixXd ab = layer_forward(m.br[k], a2, mode, cache ? &cache->cb[k] : nullptr);
        y.row(k) = ((m.head[k].W * ab).colwise() + m.head[k].b).row(0);
    }
    return y;
}

// Mean over batch and heads of squared error, standardized space.
inline double loss_mse(const MatrixXd& pred, const MatrixXd& label) {
    if (pred.rows() != label.rows() || pred.cols() != label.cols())
        throw std::invalid_argument("shape mismatch in loss");
    return (pred - label).array().square().mean();
}

// Full backward pass: train-mode forward on the batch, then analytic
// gradients for every parameter. head_mask disables heads (SO-DNN trains
// only the delay head).
inline double backward(Mlp& m, const MatrixXd& x, const MatrixXd& labels, MlpGrads& grads,
                       const std::array<bool, 3>& head_mask = {true, true, true}) {
    using namespace nn_detail;
    ForwardCache cache;
    MatrixXd pred = forward(m, x, RunMode::train, &cache);
    MatrixXd diff = pred - labels;
    for (int k = 0; k < 3; ++k)
        if (!head_mask[k]) diff.row(k).setZero();
    const double denom = static_cast<double>(pred.size());
    const double loss = diff.array().square().sum() / denom;
    MatrixXd dy = 2.0 * diff / denom;

    // mirror param_refs order: l1, l2, br0..2, head0..2
    MatrixXd da2_total = MatrixXd::Zero(m.widths.h2, x.cols());
    std::array<MatrixXd, 3> dWb;
    std::array<VectorXd, 3> dbb, dgb, dbeb;
    std::array<MatrixXd, 3> dWh;
    std::array<VectorXd, 3> dbh;
    for (int k = 0; k < 3; ++k) {
        MatrixXd dab = m.head[k].W.transpose() * dy.row(k);
        dWh[k] = dy.row(k) * cache.cb[k].a.transpose();
        dbh[k] = VectorXd::Constant(1, dy.row(k).sum());
        da2_total += layer_backward(m.br[k], cache.cb[k], dab, dWb[k], dbb[k], dgb[k],
                                    dbeb[k]);
    }
    MatrixXd dW2;
    VectorXd db2, dg2, dbe2;
    MatrixXd da1 = layer_backward(m.l2, cache.c2, da2_total, dW2, db2, dg2, dbe2);
    MatrixXd dW1;
    VectorXd db1, dg1, dbe1;
    layer_backward(m.l1, cache.c1, da1, dW1, db1, dg1, dbe1);

    auto flat = [](const MatrixXd& a) {
        MatrixXd out(a.size(), 1);
        std::copy(a.data(), a.data() + a.size(), out.data());
        return out;
    };
    std::vector<MatrixXd> ordered;
    auto push_layer = [&](const MatrixXd& dW, const VectorXd& db, const VectorXd& dg,
                          const VectorXd& dbeta) {
        ordered.push_back(flat(dW));
        ordered.push_back(flat(db));
        ordered.push_back(flat(dg));
        ordered.push_back(flat(dbeta));
    };
    push_layer(dW1, db1, dg1, dbe1);
    push_layer(dW2, db2, dg2, dbe2);
    for (int k = 0; k < 3; ++k) push_layer(dWb[k], dbb[k], dgb[k], dbeb[k]);
    for (int k = 0; k < 3; ++k) {
        ordered.push_back(flat(dWh[k]));
        ordered.push_back(flat(dbh[k]));
    }
    grads.g = std::move(ordered);

    // running moments update (momentum 0.1), training side effect
    auto upd = [&](DenseBn& l, const BnCache& c) {
        l.run_mean = 0.9 * l.run_mean + 0.1 * c.mu;
        l.run_var = 0.9 * l.run_var + 0.1 * c.var;
    };
    upd(m.l1, cache.c1.bn);
    upd(m.l2, cache.c2.bn);
    for (int k = 0; k < 3; ++k) upd(m.br[k], cache.cb[k].bn);
    return loss;
}

struct TrainConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    int batch_size = 1000;
    int epochs = 200;
    std::uint64_t seed = 1;
    std::array<bool, 3> head_mask{true, true, true};
    double target_mse = -1.0; // stop early when eval-mode MSE drops below
};

struct AdamState {
    MlpGrads m, v;
    long step = 0;

    static AdamState zeros_like(Mlp& mlp) {
        return AdamState{MlpGrads::zeros_like(mlp), MlpGrads::zeros_like(mlp), 0};
    }
};

inline void adam_step(Mlp& mlp, const MlpGrads& grads, AdamState& st, const TrainConfig& cfg) {
    ++st.step;
    auto refs = param_refs(mlp);
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.step));
    for (std::size_t i = 0; i < refs.size(); ++i) {
        double* p = refs[i].data;
        const double* g = grads.g[i].data();
        double* mm = st.m.g[i].data();
        double* vv = st.v.g[i].data();
        for (long j = 0; j < refs[i].size; ++j) {
            mm[j] = cfg.beta1 * mm[j] + (1.0 - cfg.beta1) * g[j];
            vv[j] = cfg.beta2 * vv[j] + (1.0 - cfg.beta2) * g[j] * g[j];
            const double mhat = mm[j] / bc1;
            const double vhat = vv[j] / bc2;
            p[j] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.adam_eps);
        }
    }
}

struct Dataset {
    MatrixXd features; // raw physical units, kFeatureDim x N
    MatrixXd labels;   // raw physical units, 3 x N
    std::vector<double> t; // snapshot timestamp per sample
};

// Kinematics -> feature block: lat, sin/cos lon, alt, speed, sin/cos heading.
inline void write_kin_features(Eigen::Ref<MatrixXd> col, int offset, const Kinematics& k) {
    col(offset + 0, 0) = k.pos.lat_deg;
    col(offset + 1, 0) = std::sin(deg2rad(k.pos.lon_deg));
    col(offset + 2, 0) = std::cos(deg2rad(k.pos.lon_deg));
    col(offset + 3, 0) = k.pos.alt_km;
    col(offset + 4, 0) = k.speed_kmh;
    col(offset + 5, 0) = std::sin(deg2rad(k.heading_deg));
    col(offset + 6, 0) = std::cos(deg2rad(k.heading_deg));
}

inline VectorXd feature_vector(const Kinematics& fn, const Kinematics& b, const Kinematics& dn,
                               const EpsConstraint& eps) {
    MatrixXd col(kFeatureDim, 1);
    write_kin_features(col, 0, fn);
    write_kin_features(col, 7, b);
    write_kin_features(col, 14, dn);
    col(21, 0) = eps.eps_c_bps;
    col(22, 0) = eps.eps_l_s;
    return col.col(0);
}

inline Kinematics kin_of(const SnapNode& n) {
    return Kinematics{n.pos, n.speed_kmh, n.heading_deg};
}

// One sample per (snapshot, non-ship node b, eps); the forwarding-node slot
// is filled by a uniformly random neighbor of b.
inline Dataset build_dataset(const std::vector<const Scenario*>& scenarios, double t_begin,
                             double t_end, double snapshot_step_s,
                             const std::vector<EpsConstraint>& eps_samples,
                             const std::string& dst, std::uint64_t seed,
                             const LinkBudgetConfig& lcfg = {}) {
    if (!(t_end > t_begin)) throw std::invalid_argument("empty time window");
    std::mt19937_64 rng(seed);
    std::vector<VectorXd> feats;
    std::vector<VectorXd> labs;
    std::vector<double> ts;
    const QueuingModel q = QueuingModel::constant(0.010);
    for (const Scenario* sc : scenarios) {
        for (double t = t_begin; t <= t_end + 1e-9; t += snapshot_step_s) {
            Snapshot snap = build_snapshot(*sc, t, layer_all, q, lcfg);
            if (!snap.index.count(dst)) continue;
            const int d = snap.require(dst);
            const Kinematics dn = kin_of(snap.nodes[d]);
            for (const auto& eps : eps_samples) {
                LabelTable table = label_table(snap, dst, eps);
                for (int b = 0; b < static_cast<int>(snap.nodes.size()); ++b) {
                    if (snap.nodes[b].kind == NodeKind::ship) continue;
                    if (snap.adj[b].empty()) continue;
                    const Label* lab = table.find(snap.nodes[b].id);
                    if (!lab) continue;
                    std::uniform_int_distribution<std::size_t> pick(
                        0, snap.adj[b].size() - 1);
                    const int fn = snap.adj[b][pick(rng)].first;
                    feats.push_back(feature_vector(kin_of(snap.nodes[fn]),
                                                   kin_of(snap.nodes[b]), dn, eps));
                    labs.push_back(
                        (VectorXd(3) << lab->d_star_s, lab->c_star_bps, lab->l_star_s)
                            .finished());
                    ts.push_back(t);
                }
            }
        }
    }
    if (feats.empty()) throw std::invalid_argument("no samples in window");
    Dataset ds;
    ds.features.resize(kFeatureDim, static_cast<long>(feats.size()));
    ds.labels.resize(3, static_cast<long>(feats.size()));
    for (std::size_t i = 0; i < feats.size(); ++i) {
        ds.features.col(static_cast<long>(i)) = feats[i];
        ds.labels.col(static_cast<long>(i)) = labs[i];
    }
    ds.t = std::move(ts);
    return ds;
}

struct TrainResult {
    std::vector<double> loss_curve; // eval-mode full-set MSE per epoch
};

// Standardizes on the given dataset, then runs seeded mini-batch Adam.
inline TrainResult train(Mlp& m, const Dataset& ds, const TrainConfig& cfg) {
    m.fstd.fit(ds.features);
    m.lstd.fit(ds.labels);
    MatrixXd X = m.fstd.transform(ds.features);
    MatrixXd Y = m.lstd.transform(ds.labels);
    const long n = X.cols();
    std::mt19937_64 rng(cfg.seed);
    std::vector<long> order(n);
    std::iota(order.begin(), order.end(), 0L);
    AdamState st = AdamState::zeros_like(m);
    MlpGrads grads;
    TrainResult out;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (long start = 0; start < n; start += cfg.batch_size) {
            const long bs = std::min<long>(cfg.batch_size, n - start);
            if (bs < 2) continue; // batch statistics need >= 2 samples
            MatrixXd xb(X.rows(), bs), yb(3, bs);
            for (long k = 0; k < bs; ++k) {
                xb.col(k) = X.col(order[start + k]);
                yb.col(k) = Y.col(order[start + k]);
            }
            backward(m, xb, yb, grads, cfg.head_mask);
            adam_step(m, grads, st, cfg);
        }
        MatrixXd pred = forward(m, X, RunMode::eval);
        MatrixXd diff = pred - Y;
        for (int k = 0; k < 3; ++k)
            if (!cfg.head_mask[k]) diff.row(k).setZero();
        const double mse = diff.array().square().sum() / static_cast<double>(diff.size());
        out.loss_curve.push_back(mse);
        if (cfg.target_mse > 0.0 && mse < cfg.target_mse) break;
    }
    return out;
}

// Physical-unit prediction for a single feature vector.
inline MetricTriple predict(const Mlp& m, const VectorXd& raw_features) {
    MatrixXd z = m.fstd.transform(raw_features);
    MatrixXd y = m.lstd.inverse(forward(m, z, RunMode::eval));
    return {y(0, 0), y(1, 0), y(2, 0)};
}

// ---- Serialization (JSON, format v1; doubles round-trip bit-exactly) ----

namespace nn_detail {

inline nlohmann::json mat_to_json(const MatrixXd& m) {
    std::vector<double> v(m.data(), m.data() + m.size());
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", v}};
}

inline MatrixXd mat_from_json(const nlohmann::json& j) {
    MatrixXd m(j.at("rows").get<long>(), j.at("cols").get<long>());
    auto v = j.at("data").get<std::vector<double>>();
    if (static_cast<long>(v.size()) != m.size())
        throw std::runtime_error("corrupt matrix in model file");
    std::copy(v.begin(), v.end(), m.data());
    return m;
}

inline nlohmann::json layer_to_json(const DenseBn& l) {
    return {{"W", mat_to_json(l.W)},       {"b", mat_to_json(l.b)},
            {"gamma", mat_to_json(l.gamma)}, {"beta", mat_to_json(l.beta)},
            {"run_mean", mat_to_json(l.run_mean)}, {"run_var", mat_to_json(l.run_var)}};
}

inline DenseBn layer_from_json(const nlohmann::json& j) {
    DenseBn l;
    l.W = mat_from_json(j.at("W"));
    l.b = mat_from_json(j.at("b"));
    l.gamma = mat_from_json(j.at("gamma"));
    l.beta = mat_from_json(j.at("beta"));
    l.run_mean = mat_from_json(j.at("run_mean"));
    l.run_var = mat_from_json(j.at("run_var"));
    return l;
}

} // namespace nn_detail

inline void save_model(const Mlp& m, const std::string& path) {
    using nn_detail::layer_to_json;
    using nn_detail::mat_to_json;
    nlohmann::json j;
    j["format"] = "sagin-mlp";
    j["version"] = 1;
    j["widths"] = {{"input", m.widths.input},
                   {"h1", m.widths.h1},
                   {"h2", m.widths.h2},
                   {"branch", m.widths.branch}};
    j["l1"] = layer_to_json(m.l1);
    j["l2"] = layer_to_json(m.l2);
    for (int k = 0; k < 3; ++k) {
        j["branch"].push_back(layer_to_json(m.br[k]));
        j["head"].push_back(
            {{"W", mat_to_json(m.head[k].W)}, {"b", mat_to_json(m.head[k].b)}});
    }
    j["fstd"] = {{"mean", mat_to_json(m.fstd.mean)}, {"std", mat_to_json(m.fstd.std)}};
    j["lstd"] = {{"mean", mat_to_json(m.lstd.mean)}, {"std", mat_to_json(m.lstd.std)}};
    j["meta"] = m.meta;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << j.dump() << '\n';
}

inline Mlp load_model(const std::string& path) {
    using nn_detail::layer_from_json;
    using nn_detail::mat_from_json;
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("corrupt model file: ") + e.what());
    }
    if (j.value("format", "") != "sagin-mlp" || j.value("version", 0) != 1)
        throw std::runtime_error("unrecognized model file format/version");
    Mlp m;
    m.widths.input = j.at("widths").at("input").get<int>();
    m.widths.h1 = j.at("widths").at("h1").get<int>();
    m.widths.h2 = j.at("widths").at("h2").get<int>();
    m.widths.branch = j.at("widths").at("branch").get<int>();
    m.l1 = layer_from_json(j.at("l1"));
    m.l2 = layer_from_json(j.at("l2"));
    for (int k = 0; k < 3; ++k) {
        m.br[k] = layer_from_json(j.at("branch")[k]);
        m.head[k].W = mat_from_json(j.at("head")[k].at("W"));
        m.head[k].b = mat_from_json(j.at("head")[k].at("b"));
    }
    m.fstd.mean = mat_from_json(j.at("fstd").at("mean"));
    m.fstd.std = mat_from_json(j.at("fstd").at("std"));
    m.lstd.mean = mat_from_json(j.at("lstd").at("mean"));
    m.lstd.std = mat_from_json(j.at("lstd").at("std"));
    m.meta = j.value("meta", nlohmann::json::object());
    return m;
}

} // namespace sagin
