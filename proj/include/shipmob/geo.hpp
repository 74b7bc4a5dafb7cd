#pragma once

// Spherical-earth geodesy used throughout: haversine distances in nautical
// miles, great-circle interpolation, centroids and point-in-polygon tests.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace shipmob::geo {

/// IUGG mean earth radius.
inline constexpr double kEarthRadiusM = 6371008.8;
inline constexpr double kMetresPerNmi = 1852.0;
inline constexpr double kEarthRadiusNmi = kEarthRadiusM / kMetresPerNmi;

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const LatLon&, const LatLon&) = default;
};

constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

inline bool is_valid(LatLon p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon >= -180.0 && p.lon <= 180.0;
}

/// Central angle between two points, in radians (haversine form).
inline double central_angle(LatLon a, LatLon b) {
  const double phi1 = deg2rad(a.lat);
  const double phi2 = deg2rad(b.lat);
  const double s_phi = std::sin((phi2 - phi1) / 2.0);
  const double s_lam = std::sin(deg2rad(b.lon - a.lon) / 2.0);
  const double h = std::clamp(s_phi * s_phi + std::cos(phi1) * std::cos(phi2) * s_lam * s_lam, 0.0, 1.0);
  return 2.0 * std::asin(std::sqrt(h));
}

inline double great_circle_nmi(LatLon a, LatLon b) { return kEarthRadiusNmi * central_angle(a, b); }

/// Length of the polyline through `points`, each leg a great-circle arc.
inline double path_length_nmi(std::span<const LatLon> points) {
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) total += great_circle_nmi(points[i - 1], points[i]);
  return total;
}

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Vec3 to_unit_vector(LatLon p) {
  const double phi = deg2rad(p.lat);
  const double lam = deg2rad(p.lon);
  return {std::cos(phi) * std::cos(lam), std::cos(phi) * std::sin(lam), std::sin(phi)};
}

inline LatLon from_vector(Vec3 v) {
  const double horiz = std::hypot(v.x, v.y);
  return {rad2deg(std::atan2(v.z, horiz)), rad2deg(std::atan2(v.y, v.x))};
}

/// Point at fraction `f` of the way from `a` to `b` along the minor great-circle arc.
inline LatLon interpolate(LatLon a, LatLon b, double f) {
  const double omega = central_angle(a, b);
  if (omega < 1e-12) return {a.lat + f * (b.lat - a.lat), a.lon + f * (b.lon - a.lon)};
  const double s = std::sin(omega);
  const double wa = std::sin((1.0 - f) * omega) / s;
  const double wb = std::sin(f * omega) / s;
  const Vec3 va = to_unit_vector(a);
  const Vec3 vb = to_unit_vector(b);
  return from_vector({wa * va.x + wb * vb.x, wa * va.y + wb * vb.y, wa * va.z + wb * vb.z});
}

/// Initial true bearing from `a` towards `b`, degrees in [0, 360).
inline double initial_bearing_deg(LatLon a, LatLon b) {
  const double phi1 = deg2rad(a.lat);
  const double phi2 = deg2rad(b.lat);
  const double dlam = deg2rad(b.lon - a.lon);
  const double y = std::sin(dlam) * std::cos(phi2);
  const double x = std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dlam);
  double brg = rad2deg(std::atan2(y, x));
  if (brg < 0.0) brg += 360.0;
  if (brg >= 360.0) brg -= 360.0;
  return brg;
}

/// Spherical centroid (normalised mean of unit vectors); safe across the antimeridian.
inline LatLon centroid(std::span<const LatLon> points) {
  Vec3 sum;
  for (const auto& p : points) {
    const Vec3 v = to_unit_vector(p);
    sum.x += v.x;
    sum.y += v.y;
    sum.z += v.z;
  }
  return from_vector(sum);
}

/// Simple polygon in lon/lat coordinates. The ring may or may not repeat its first vertex.
struct Polygon {
  std::vector<LatLon> ring;

  /// Winding-number membership; points on the boundary may fall either way.
  bool contains(LatLon p) const {
    const std::size_t n = ring.size();
    if (n < 3) return false;
    int winding = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const LatLon& a = ring[i];
      const LatLon& b = ring[(i + 1) % n];
      const double cross = (b.lon - a.lon) * (p.lat - a.lat) - (p.lon - a.lon) * (b.lat - a.lat);
      if (a.lat <= p.lat) {
        if (b.lat > p.lat && cross > 0.0) ++winding;
      } else if (b.lat <= p.lat && cross < 0.0) {
        --winding;
      }
    }
    return winding != 0;
  }
};

}  // namespace shipmob::geo
