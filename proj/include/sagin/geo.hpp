#pragma once

// Spherical-Earth geodesy: geodetic <-> ECEF conversion, slant ranges,
// great-circle distances, and horizon-limited line-of-sight checks.

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sagin {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kSpeedOfLightKmS = 299792.458;
inline constexpr double kMuEarth = 398600.0; // km^3/s^2

inline constexpr double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
inline constexpr double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

// Wraps an angle into [-180, 180).
inline double wrap_lon(double lon_deg) {
    double x = std::fmod(lon_deg + 180.0, 360.0);
    if (x < 0) x += 360.0;
    return x - 180.0;
}

// Wraps an angle into [0, 360).
inline double wrap_heading(double h_deg) {
    double x = std::fmod(h_deg, 360.0);
    if (x < 0) x += 360.0;
    return x;
}

struct GeoPos {
    double lat_deg = 0.0; // [-90, 90]
    double lon_deg = 0.0; // [-180, 180)
    double alt_km = 0.0;  // >= 0 above mean sea level
};

// Validating constructor helper: rejects out-of-range latitude/altitude,
// normalizes longitude.
inline GeoPos make_geo(double lat_deg, double lon_deg, double alt_km) {
    if (!(lat_deg >= -90.0 && lat_deg <= 90.0))
        throw std::invalid_argument("latitude out of [-90, 90]");
    if (!std::isfinite(alt_km) || alt_km < 0.0)
        throw std::invalid_argument("altitude must be finite and non-negative");
    if (!std::isfinite(lon_deg))
        throw std::invalid_argument("longitude must be finite");
    return GeoPos{lat_deg, wrap_lon(lon_deg), alt_km};
}

struct EcefVec {
    double x_km = 0.0;
    double y_km = 0.0;
    double z_km = 0.0;

    double norm() const { return std::sqrt(x_km * x_km + y_km * y_km + z_km * z_km); }
};

inline EcefVec operator-(const EcefVec& a, const EcefVec& b) {
    return {a.x_km - b.x_km, a.y_km - b.y_km, a.z_km - b.z_km};
}

inline EcefVec to_ecef(const GeoPos& p) {
    const double r = kEarthRadiusKm + p.alt_km;
    const double lat = deg2rad(p.lat_deg);
    const double lon = deg2rad(p.lon_deg);
    const double c = std::cos(lat);
    return {r * c * std::cos(lon), r * c * std::sin(lon), r * std::sin(lat)};
}

inline GeoPos from_ecef(const EcefVec& v) {
    const double r = v.norm();
    if (r <= 0.0) throw std::invalid_argument("degenerate ECEF vector");
    const double lat = std::asin(std::clamp(v.z_km / r, -1.0, 1.0));
    const double lon = std::atan2(v.y_km, v.x_km);
    return GeoPos{rad2deg(lat), wrap_lon(rad2deg(lon)), r - kEarthRadiusKm};
}

inline double slant_distance(const GeoPos& a, const GeoPos& b) {
    return (to_ecef(a) - to_ecef(b)).norm();
}

// Maximum slant distance with direct line of sight over a spherical Earth,
// for endpoint altitudes h1 and h2.
inline double horizon_range(double h1_km, double h2_km) {
    const double t1 = std::sqrt(2.0 * kEarthRadiusKm * h1_km + h1_km * h1_km);
    const double t2 = std::sqrt(2.0 * kEarthRadiusKm * h2_km + h2_km * h2_km);
    return t1 + t2;
}

inline bool visible(const GeoPos& a, const GeoPos& b) {
    return slant_distance(a, b) <= horizon_range(a.alt_km, b.alt_km);
}

// Great-circle arc between the sub-points of a and b, at sea-level radius.
inline double ground_distance(const GeoPos& a, const GeoPos& b) {
    const double lat1 = deg2rad(a.lat_deg), lat2 = deg2rad(b.lat_deg);
    const double dlat = lat2 - lat1;
    const double dlon = deg2rad(b.lon_deg) - deg2rad(a.lon_deg);
    const double s1 = std::sin(dlat / 2.0), s2 = std::sin(dlon / 2.0);
    const double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

// Initial great-circle bearing from a toward b, degrees in [0, 360).
inline double initial_bearing(const GeoPos& a, const GeoPos& b) {
    const double lat1 = deg2rad(a.lat_deg), lat2 = deg2rad(b.lat_deg);
    const double dlon = deg2rad(b.lon_deg) - deg2rad(a.lon_deg);
    const double y = std::sin(dlon) * std::cos(lat2);
    const double x = std::cos(lat1) * std::sin(lat2) -
                     std::sin(lat1) * std::cos(lat2) * std::cos(dlon);
    return wrap_heading(rad2deg(std::atan2(y, x)));
}

} // namespace sagin
