#pragma once

// Node trajectories: circular-orbit constellation propagation, synthetic
// flight/ship generation, time-shift augmentation, interpolation, CSV I/O.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sagin/geo.hpp"

#include <nlohmann/json.hpp>

namespace sagin {

enum class NodeKind { satellite, airplane, ship, ground_station, base_station };

inline const char* kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::satellite: return "satellite";
        case NodeKind::airplane: return "airplane";
        case NodeKind::ship: return "ship";
        case NodeKind::ground_station: return "ground_station";
        case NodeKind::base_station: return "base_station";
    }
    return "?";
}

inline NodeKind kind_from_name(const std::string& s) {
    if (s == "satellite") return NodeKind::satellite;
    if (s == "airplane") return NodeKind::airplane;
    if (s == "ship") return NodeKind::ship;
    if (s == "ground_station") return NodeKind::ground_station;
    if (s == "base_station") return NodeKind::base_station;
    throw std::invalid_argument("unknown node kind: " + s);
}

struct TraceRecord {
    double t = 0.0; // seconds since scenario epoch
    GeoPos pos;
    double speed_kmh = 0.0;
    double heading_deg = 0.0; // [0, 360)
};

struct NodeTrace {
    std::string id;
    NodeKind kind = NodeKind::ship;
    std::vector<TraceRecord> records; // strictly increasing in t

    double t_begin() const { return records.front().t; }
    double t_end() const { return records.back().t; }
};

struct ConstellationParams {
    int n_planes = 6;
    int sats_per_plane = 11;
    double altitude_km = 781.0;
    double inclination_deg = 86.4;
    double raan_spacing_deg = 30.0;
    double phase_offset_deg = 180.0 / 11.0; // Walker-star interleave
};

struct Scenario {
    std::string epoch; // UTC timestamp string, informational
    double duration_s = 0.0;
    std::vector<NodeTrace> traces;
    std::string destination_id;

    const NodeTrace* find(const std::string& id) const {
        for (const auto& tr : traces)
            if (tr.id == id) return &tr;
        return nullptr;
    }
};

// Circular-orbit speed, km/s.
inline double orbital_speed_kms(double altitude_km) {
    if (altitude_km <= 0.0) throw std::invalid_argument("altitude must be positive");
    return std::sqrt(kMuEarth / (kEarthRadiusKm + altitude_km));
}

namespace detail {

// Heading of an ECEF velocity at an ECEF position: bearing of the local
// horizontal component, degrees clockwise from north.
inline double heading_from_velocity(const EcefVec& r, double vx, double vy, double vz) {
    const double rn = r.norm();
    const double lat = std::asin(std::clamp(r.z_km / rn, -1.0, 1.0));
    const double lon = std::atan2(r.y_km, r.x_km);
    // local ENU basis
    const double ex = -std::sin(lon), ey = std::cos(lon), ez = 0.0;
    const double nx = -std::sin(lat) * std::cos(lon);
    const double ny = -std::sin(lat) * std::sin(lon);
    const double nz = std::cos(lat);
    const double ve = vx * ex + vy * ey + vz * ez;
    const double vn = vx * nx + vy * ny + vz * nz;
    return wrap_heading(rad2deg(std::atan2(ve, vn)));
}

// Great-circle interpolation between two positions; altitude and radius
// interpolate linearly.
inline GeoPos slerp(const GeoPos& a, const GeoPos& b, double f) {
    EcefVec va = to_ecef(a), vb = to_ecef(b);
    const double na = va.norm(), nb = vb.norm();
    const double ax = va.x_km / na, ay = va.y_km / na, az = va.z_km / na;
    const double bx = vb.x_km / nb, by = vb.y_km / nb, bz = vb.z_km / nb;
    double dot = std::clamp(ax * bx + ay * by + az * bz, -1.0, 1.0);
    const double ang = std::acos(dot);
    double wa, wb;
    if (ang < 1e-12) {
        wa = 1.0 - f;
        wb = f;
    } else {
        wa = std::sin((1.0 - f) * ang) / std::sin(ang);
        wb = std::sin(f * ang) / std::sin(ang);
    }
    const double r = (1.0 - f) * na + f * nb;
    EcefVec out{r * (wa * ax + wb * bx), r * (wa * ay + wb * by), r * (wa * az + wb * bz)};
    return from_ecef(out);
}

inline double lerp_heading(double h1, double h2, double f) {
    double d = std::fmod(h2 - h1 + 540.0, 360.0) - 180.0;
    return wrap_heading(h1 + f * d);
}

} // namespace detail

// Propagates a Walker-star constellation on circular orbits. The spherical
// model keeps orbits fixed in the Earth frame (no rotation coupling).
inline std::vector<NodeTrace> propagate_constellation(const ConstellationParams& params,
                                                      const std::string& epoch,
                                                      double duration_s, double step_s) {
    if (step_s <= 0.0) throw std::invalid_argument("step_s must be positive");
    if (params.altitude_km <= 0.0) throw std::invalid_argument("altitude must be positive");
    const double a = kEarthRadiusKm + params.altitude_km;
    const double v = orbital_speed_kms(params.altitude_km);
    const double n_rate = v / a; // rad/s
    const double inc = deg2rad(params.inclination_deg);

    std::vector<NodeTrace> out;
    for (int p = 0; p < params.n_planes; ++p) {
        const double raan = deg2rad(p * params.raan_spacing_deg);
        // in-plane basis: ascending-node direction and its orthogonal
        const double n1x = std::cos(raan), n1y = std::sin(raan), n1z = 0.0;
        const double n2x = -std::sin(raan) * std::cos(inc);
        const double n2y = std::cos(raan) * std::cos(inc);
        const double n2z = std::sin(inc);
        for (int s = 0; s < params.sats_per_plane; ++s) {
            NodeTrace tr;
            tr.id = "sat_" + std::to_string(p) + "_" + std::to_string(s);
            tr.kind = NodeKind::satellite;
            const double u0 = deg2rad(s * 360.0 / params.sats_per_plane +
                                      p * params.phase_offset_deg);
            for (double t = 0.0; t <= duration_s + 1e-9; t += step_s) {
                const double u = u0 + n_rate * t;
                const double cu = std::cos(u), su = std::sin(u);
                EcefVec r{a * (cu * n1x + su * n2x), a * (cu * n1y + su * n2y),
                          a * (cu * n1z + su * n2z)};
                const double vx = v * (-su * n1x + cu * n2x);
                const double vy = v * (-su * n1y + cu * n2y);
                const double vz = v * (-su * n1z + cu * n2z);
                TraceRecord rec;
                rec.t = t;
                rec.pos = from_ecef(r);
                rec.speed_kmh = v * 3600.0;
                rec.heading_deg = detail::heading_from_velocity(r, vx, vy, vz);
                tr.records.push_back(rec);
            }
            out.push_back(std::move(tr));
        }
    }
    return out;
}

struct FlightRoute {
    GeoPos origin;
    GeoPos dest;
    double departure_t = 0.0;
};

// Great-circle cruise traces sampled every 10 s at constant altitude/speed.
inline std::vector<NodeTrace> synth_flights(const std::vector<FlightRoute>& routes,
                                            double cruise_alt_km = 12.0,
                                            double cruise_speed_kmh = 900.0) {
    std::vector<NodeTrace> out;
    int idx = 0;
    for (const auto& rt : routes) {
        const double glen = ground_distance(rt.origin, rt.dest);
        if (glen <= 0.0) throw std::invalid_argument("zero-length flight route");
        const double duration = glen / cruise_speed_kmh * 3600.0;
        NodeTrace tr;
        tr.id = "fl_" + std::to_string(idx++);
        tr.kind = NodeKind::airplane;
        GeoPos o = rt.origin, d = rt.dest;
        o.alt_km = cruise_alt_km;
        d.alt_km = cruise_alt_km;
        const int n = static_cast<int>(std::floor(duration / 10.0 + 1e-9));
        for (int k = 0; k <= n; ++k) {
            const double f = (k * 10.0) / duration;
            TraceRecord rec;
            rec.t = rt.departure_t + k * 10.0;
            rec.pos = detail::slerp(o, d, f);
            rec.speed_kmh = cruise_speed_kmh;
            rec.heading_deg = initial_bearing(rec.pos, d);
            tr.records.push_back(rec);
        }
        out.push_back(std::move(tr));
    }
    return out;
}

struct ShipBox {
    double lat_min = 40.0, lat_max = 55.0;
    double lon_min = -50.0, lon_max = -10.0;
};

// Slow random-waypoint ship traces inside a bounding box; speed <= 40 km/h.
inline std::vector<NodeTrace> synth_ships(int count, const ShipBox& box, double duration_s,
                                          std::uint64_t seed, double step_s = 10.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ulat(box.lat_min, box.lat_max);
    std::uniform_real_distribution<double> ulon(box.lon_min, box.lon_max);
    std::uniform_real_distribution<double> uspeed(0.0, 40.0);
    std::vector<NodeTrace> out;
    for (int i = 0; i < count; ++i) {
        NodeTrace tr;
        tr.id = "ship_" + std::to_string(i);
        tr.kind = NodeKind::ship;
        GeoPos cur = make_geo(ulat(rng), ulon(rng), 0.0);
        GeoPos wp = make_geo(ulat(rng), ulon(rng), 0.0);
        double speed = uspeed(rng);
        for (double t = 0.0; t <= duration_s + 1e-9; t += step_s) {
            TraceRecord rec;
            rec.t = t;
            rec.pos = cur;
            rec.speed_kmh = speed;
            rec.heading_deg = initial_bearing(cur, wp);
            tr.records.push_back(rec);
            // advance toward waypoint
            const double leg = ground_distance(cur, wp);
            const double stepkm = speed / 3600.0 * step_s;
            if (leg <= stepkm || leg < 1e-6) {
                cur = wp;
                wp = make_geo(ulat(rng), ulon(rng), 0.0);
                speed = uspeed(rng);
            } else {
                cur = detail::slerp(cur, wp, stepkm / leg);
            }
        }
        out.push_back(std::move(tr));
    }
    return out;
}

// Shifts each airplane trace along the timeline by an independent
// zero-mean Gaussian draw; everything else is left untouched.
inline std::vector<NodeTrace> time_shift_augment(const std::vector<NodeTrace>& traces,
                                                 double sigma_s, std::uint64_t seed) {
    if (sigma_s < 0.0) throw std::invalid_argument("sigma_s must be >= 0");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<NodeTrace> out;
    out.reserve(traces.size());
    for (const auto& tr : traces) {
        NodeTrace copy = tr;
        if (tr.kind == NodeKind::airplane && sigma_s > 0.0) {
            const double shift = gauss(rng) * sigma_s;
            for (auto& rec : copy.records) rec.t += shift;
        }
        out.push_back(std::move(copy));
    }
    return out;
}

struct Kinematics {
    GeoPos pos;
    double speed_kmh = 0.0;
    double heading_deg = 0.0;
};

// Interpolated state at time t; empty when the node does not exist at t.
inline std::optional<Kinematics> position_at(const NodeTrace& trace, double t) {
    const auto& rs = trace.records;
    if (rs.empty() || t < rs.front().t || t > rs.back().t) return std::nullopt;
    auto it = std::lower_bound(rs.begin(), rs.end(), t,
                               [](const TraceRecord& r, double v) { return r.t < v; });
    if (it->t == t) return Kinematics{it->pos, it->speed_kmh, it->heading_deg};
    const TraceRecord& hi = *it;
    const TraceRecord& lo = *(it - 1);
    const double f = (t - lo.t) / (hi.t - lo.t);
    Kinematics k;
    k.pos = detail::slerp(lo.pos, hi.pos, f);
    k.speed_kmh = lo.speed_kmh + f * (hi.speed_kmh - lo.speed_kmh);
    k.heading_deg = detail::lerp_heading(lo.heading_deg, hi.heading_deg, f);
    return k;
}

// ---- Trace CSV + metadata JSON ------------------------------------------
//
// CSV schema, one row per record (header required):
//   node_id,kind,t_s,lat_deg,lon_deg,alt_km,speed_kmh,heading_deg
// Metadata JSON: {epoch, duration_s, destination_id}, stored next to the
// CSV at <base>.json.

inline void save_traces(const Scenario& sc, const std::string& base_path) {
    {
        std::map<std::string, int> seen;
        for (const auto& tr : sc.traces)
            if (++seen[tr.id] > 1) throw std::runtime_error("duplicate node id: " + tr.id);
    }
    std::ofstream csv(base_path + ".csv");
    if (!csv) throw std::runtime_error("cannot open " + base_path + ".csv");
    csv << "node_id,kind,t_s,lat_deg,lon_deg,alt_km,speed_kmh,heading_deg\n";
    csv.precision(17);
    for (const auto& tr : sc.traces)
        for (const auto& r : tr.records)
            csv << tr.id << ',' << kind_name(tr.kind) << ',' << r.t << ',' << r.pos.lat_deg
                << ',' << r.pos.lon_deg << ',' << r.pos.alt_km << ',' << r.speed_kmh << ','
                << r.heading_deg << '\n';
    nlohmann::json meta = {{"epoch", sc.epoch},
                           {"duration_s", sc.duration_s},
                           {"destination_id", sc.destination_id}};
    std::ofstream js(base_path + ".json");
    js << meta.dump(2) << '\n';
}

inline Scenario load_traces(const std::string& base_path) {
    std::ifstream csv(base_path + ".csv");
    if (!csv) throw std::runtime_error("cannot open " + base_path + ".csv");
    std::string line;
    if (!std::getline(csv, line)) throw std::runtime_error("empty trace file");

    Scenario sc;
    std::map<std::string, std::size_t> index;
    std::size_t lineno = 1;
    while (std::getline(csv, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string id, kind_s, field;
        std::vector<double> vals;
        try {
            if (!std::getline(ss, id, ',') || !std::getline(ss, kind_s, ','))
                throw std::invalid_argument("missing fields");
            while (std::getline(ss, field, ',')) vals.push_back(std::stod(field));
            if (vals.size() != 6) throw std::invalid_argument("wrong field count");
        } catch (const std::exception&) {
            throw std::runtime_error("malformed trace row at line " + std::to_string(lineno));
        }
        const double t = vals[0], lat = vals[1], lon = vals[2], alt = vals[3];
        const double speed = vals[4], heading = vals[5];
        if (lat < -90 || lat > 90 || lon < -180 || lon >= 180 || alt < 0 || speed < 0 ||
            heading < 0 || heading >= 360)
            throw std::runtime_error("out-of-range value at line " + std::to_string(lineno));

        auto it = index.find(id);
        if (it == index.end()) {
            index[id] = sc.traces.size();
            NodeTrace tr;
            tr.id = id;
            tr.kind = kind_from_name(kind_s);
            sc.traces.push_back(std::move(tr));
            it = index.find(id);
        } else if (sc.traces[it->second].kind != kind_from_name(kind_s)) {
            throw std::runtime_error("node " + id + " changes kind at line " +
                                     std::to_string(lineno));
        }
        NodeTrace& tr = sc.traces[it->second];
        if (!tr.records.empty() && t <= tr.records.back().t)
            throw std::runtime_error("non-increasing timestamps for node " + id + " at line " +
                                     std::to_string(lineno));
        tr.records.push_back(TraceRecord{t, GeoPos{lat, lon, alt}, speed, heading});
    }
    if (sc.traces.empty()) throw std::runtime_error("trace file has no nodes");

    std::ifstream js(base_path + ".json");
    if (!js) throw std::runtime_error("cannot open " + base_path + ".json");
    nlohmann::json meta = nlohmann::json::parse(js);
    sc.epoch = meta.at("epoch").get<std::string>();
    sc.duration_s = meta.at("duration_s").get<double>();
    sc.destination_id = meta.at("destination_id").get<std::string>();
    if (!sc.find(sc.destination_id))
        throw std::runtime_error("destination_id not present among traces");
    return sc;
}

} // namespace sagin
