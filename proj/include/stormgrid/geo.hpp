#pragma once

#include <span>
#include <vector>

namespace stormgrid {

/// Mean Earth radius (IUGG), km.
inline constexpr double kEarthRadiusKm = 6371.0088;

struct LatLon {
    double lat = 0.0;  // degrees north
    double lon = 0.0;  // degrees east

    friend bool operator==(const LatLon&, const LatLon&) = default;
};

/// Offset in a local tangent plane, km.
struct PlaneOffset {
    double east = 0.0;
    double north = 0.0;
};

double deg_to_rad(double deg);
double rad_to_deg(double rad);

/// Wrap an angle into [0, 360).
double wrap_degrees(double deg);

double haversine_km(LatLon a, LatLon b);

/// Initial great-circle bearing from `from` to `to`, degrees clockwise from north in [0, 360).
double bearing_deg(LatLon from, LatLon to);

/// Equirectangular projection around a fixed origin. Accurate to well under
/// 1% over a few hundred km, which is all the storm track and the terrain
/// raster need.
class LocalFrame {
public:
    explicit LocalFrame(LatLon origin) : origin_(origin) {}

    PlaneOffset to_plane(LatLon p) const;
    LatLon to_geo(PlaneOffset offset) const;
    LatLon origin() const { return origin_; }

private:
    LatLon origin_;
};

struct GeoBox {
    double min_lat = 0.0;
    double max_lat = 0.0;
    double min_lon = 0.0;
    double max_lon = 0.0;

    bool contains(LatLon p) const;
    LatLon center() const;
    /// Grow every edge outward by `km`.
    GeoBox inflated(double km) const;
    void extend(LatLon p);

    static GeoBox around(std::span<const LatLon> points);
};

double polyline_length_km(std::span<const LatLon> polyline);

/// Point at arc length `s_km` along the polyline (clamped to the ends),
/// linear in lat/lon within each segment.
LatLon point_along(std::span<const LatLon> polyline, double s_km);

/// Bearing of the segment that contains arc length `s_km`.
double bearing_along(std::span<const LatLon> polyline, double s_km);

}  // namespace stormgrid
