#include "stormgrid/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace stormgrid {

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

double wrap_degrees(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w < 0.0) w += 360.0;
    if (w >= 360.0) w -= 360.0;
    return w;
}

double haversine_km(LatLon a, LatLon b) {
    const double phi1 = deg_to_rad(a.lat);
    const double phi2 = deg_to_rad(b.lat);
    const double dphi = phi2 - phi1;
    const double dlambda = deg_to_rad(b.lon - a.lon);
    const double s = std::sin(dphi / 2.0);
    const double t = std::sin(dlambda / 2.0);
    const double h = s * s + std::cos(phi1) * std::cos(phi2) * t * t;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

double bearing_deg(LatLon from, LatLon to) {
    const double phi1 = deg_to_rad(from.lat);
    const double phi2 = deg_to_rad(to.lat);
    const double dlambda = deg_to_rad(to.lon - from.lon);
    const double y = std::sin(dlambda) * std::cos(phi2);
    const double x = std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dlambda);
    return wrap_degrees(rad_to_deg(std::atan2(y, x)));
}

PlaneOffset LocalFrame::to_plane(LatLon p) const {
    const double coslat = std::cos(deg_to_rad(origin_.lat));
    return {kEarthRadiusKm * deg_to_rad(p.lon - origin_.lon) * coslat,
            kEarthRadiusKm * deg_to_rad(p.lat - origin_.lat)};
}

LatLon LocalFrame::to_geo(PlaneOffset offset) const {
    const double coslat = std::cos(deg_to_rad(origin_.lat));
    return {origin_.lat + rad_to_deg(offset.north / kEarthRadiusKm),
            origin_.lon + rad_to_deg(offset.east / (kEarthRadiusKm * coslat))};
}

bool GeoBox::contains(LatLon p) const {
    return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon && p.lon <= max_lon;
}

LatLon GeoBox::center() const { return {(min_lat + max_lat) / 2.0, (min_lon + max_lon) / 2.0}; }

GeoBox GeoBox::inflated(double km) const {
    const double dlat = rad_to_deg(km / kEarthRadiusKm);
    const double widest = std::max(std::abs(min_lat), std::abs(max_lat)) + dlat;
    const double dlon = rad_to_deg(km / (kEarthRadiusKm * std::cos(deg_to_rad(std::min(widest, 89.0)))));
    return {min_lat - dlat, max_lat + dlat, min_lon - dlon, max_lon + dlon};
}

void GeoBox::extend(LatLon p) {
    min_lat = std::min(min_lat, p.lat);
    max_lat = std::max(max_lat, p.lat);
    min_lon = std::min(min_lon, p.lon);
    max_lon = std::max(max_lon, p.lon);
}

GeoBox GeoBox::around(std::span<const LatLon> points) {
    if (points.empty()) return {};
    GeoBox box{points[0].lat, points[0].lat, points[0].lon, points[0].lon};
    for (const auto& p : points) box.extend(p);
    return box;
}

double polyline_length_km(std::span<const LatLon> polyline) {
    double total = 0.0;
    for (std::size_t i = 1; i < polyline.size(); ++i) total += haversine_km(polyline[i - 1], polyline[i]);
    return total;
}

namespace {

struct SegmentHit {
    std::size_t segment;  // index of the segment's start vertex
    double fraction;
};

SegmentHit locate(std::span<const LatLon> polyline, double s_km) {
    double walked = 0.0;
    for (std::size_t i = 1; i < polyline.size(); ++i) {
        const double len = haversine_km(polyline[i - 1], polyline[i]);
        if (s_km <= walked + len || i + 1 == polyline.size()) {
            const double f = len > 0.0 ? std::clamp((s_km - walked) / len, 0.0, 1.0) : 0.0;
            return {i - 1, f};
        }
        walked += len;
    }
    return {0, 0.0};
}

}  // namespace

LatLon point_along(std::span<const LatLon> polyline, double s_km) {
    if (polyline.empty()) return {};
    if (polyline.size() == 1 || s_km <= 0.0) return polyline.front();
    const auto hit = locate(polyline, s_km);
    const auto& a = polyline[hit.segment];
    const auto& b = polyline[hit.segment + 1];
    return {a.lat + hit.fraction * (b.lat - a.lat), a.lon + hit.fraction * (b.lon - a.lon)};
}

double bearing_along(std::span<const LatLon> polyline, double s_km) {
    if (polyline.size() < 2) return 0.0;
    const auto hit = locate(polyline, std::max(0.0, s_km));
    return bearing_deg(polyline[hit.segment], polyline[hit.segment + 1]);
}

}  // namespace stormgrid
