#include "stormgrid/feature_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stormgrid/error.hpp"
#include "stormgrid/geo.hpp"

namespace stormgrid {

const std::array<std::string_view, kFeatureCount>& feature_names() {
    static constexpr std::array<std::string_view, kFeatureCount> names{
        "max_wind", "rain_intensity", "altitude", "slope", "wind_angle", "design_wind", "op_time"};
    return names;
}

std::string_view feature_name(Feature f) { return feature_names()[static_cast<std::size_t>(f)]; }

std::optional<Feature> feature_from_name(std::string_view name) {
    const auto& names = feature_names();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<Feature>(i);
    return std::nullopt;
}

std::vector<std::string> canonical_feature_order() {
    return {feature_names().begin(), feature_names().end()};
}

std::vector<FeatureRange> default_feature_ranges(bool op_time_positive) {
    return {
        {0.0, 60.0, Sign::Positive},    // max wind, m/s
        {0.0, 60.0, Sign::Positive},    // rain intensity, mm/h
        {-20.0, 150.0, Sign::Positive}, // altitude, m
        {0.0, 180.0, Sign::Positive},   // slope, degrees
        {0.0, 180.0, Sign::Positive},   // wind angle, degrees
        {20.0, 50.0, Sign::Negative},   // design wind, m/s
        {0.0, 40.0, op_time_positive ? Sign::Positive : Sign::Negative},  // operation time, years
    };
}

double rain_10min(double r24h_mm) {
    if (r24h_mm <= 0.0) return 0.0;
    return 27.08 * std::pow(r24h_mm, 0.6021);
}

double normalize(double x, const FeatureRange& range) {
    const double clamped = std::clamp(x, range.min, range.max);
    const double span = range.max - range.min;
    return range.sign == Sign::Negative ? (range.max - clamped) / span : (clamped - range.min) / span;
}

ScoreBounds score_bounds(std::span<const double> weights, std::span<const FeatureRange> ranges) {
    if (weights.size() != ranges.size())
        throw Error(ErrorKind::DimensionMismatch, "score_bounds: weights and ranges differ in length");
    double hazardous = 0.0;
    double benign = 0.0;
    for (std::size_t i = 0; i < ranges.size(); ++i) {
        const auto& r = ranges[i];
        if (!(r.min < r.max))
            throw Error(ErrorKind::NondegenerateRangeRequired, "feature " + std::to_string(i) + " has min >= max");
        const double top = r.sign == Sign::Positive ? r.max : r.min;
        const double bottom = r.sign == Sign::Positive ? r.min : r.max;
        hazardous += weights[i] * normalize(top, r);
        benign += weights[i] * normalize(bottom, r);
    }
    return {std::min(hazardous, benign), std::max(hazardous, benign)};
}

double composite_score(std::span<const double> weights, std::span<const double> normalized) {
    if (weights.size() != normalized.size())
        throw Error(ErrorKind::DimensionMismatch, "composite_score: length mismatch");
    return std::inner_product(weights.begin(), weights.end(), normalized.begin(), 0.0);
}

Coefficient correction_coefficient(double score, ScoreBounds bounds) {
    if (!(bounds.max > bounds.min)) throw Error(ErrorKind::NondegenerateRangeRequired, "score bounds are empty");
    Coefficient c;
    double w = score;
    if (w < bounds.min || w > bounds.max) {
        w = std::clamp(w, bounds.min, bounds.max);
        c.clamped = true;
    }
    c.k = 0.5 * (w - bounds.min) / (bounds.max - bounds.min) + 0.9;
    return c;
}

double wind_span_angle(double wind_direction_deg, double span_bearing_deg) {
    const double diff = wrap_degrees(wind_direction_deg - span_bearing_deg);
    return diff > 180.0 ? 360.0 - diff : diff;
}

FeatureVector unit_features(double max_wind_ms, double rain24h_mm, double altitude_m, double slope_deg,
                            double wind_angle_deg, double design_wind_ms, double op_years) {
    FeatureVector f{};
    f[static_cast<std::size_t>(Feature::MaxWind)] = max_wind_ms;
    f[static_cast<std::size_t>(Feature::RainIntensity)] = rain_10min(rain24h_mm);
    f[static_cast<std::size_t>(Feature::Altitude)] = altitude_m;
    f[static_cast<std::size_t>(Feature::Slope)] = slope_deg;
    f[static_cast<std::size_t>(Feature::WindAngle)] = wind_angle_deg;
    f[static_cast<std::size_t>(Feature::DesignWind)] = design_wind_ms;
    f[static_cast<std::size_t>(Feature::OpTime)] = op_years;
    return f;
}

CorrectionModel::CorrectionModel(std::vector<double> weights, std::vector<FeatureRange> ranges)
    : weights_(std::move(weights)), ranges_(std::move(ranges)) {
    if (weights_.size() != kFeatureCount || ranges_.size() != kFeatureCount)
        throw Error(ErrorKind::DimensionMismatch, "correction model needs one weight and range per feature");
    double sum = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0)) throw Error(ErrorKind::InvalidArgument, "feature weights must be non-negative");
        sum += w;
    }
    if (!(sum > 0.0)) throw Error(ErrorKind::InvalidArgument, "feature weights sum to zero");
    for (double& w : weights_) w /= sum;
    bounds_ = score_bounds(weights_, ranges_);
}

FeatureVector CorrectionModel::normalized(const FeatureVector& raw) const {
    FeatureVector out{};
    for (std::size_t i = 0; i < kFeatureCount; ++i) out[i] = normalize(raw[i], ranges_[i]);
    return out;
}

double CorrectionModel::score(const FeatureVector& raw) const {
    const auto n = normalized(raw);
    return composite_score(weights_, n);
}

Coefficient CorrectionModel::coefficient(const FeatureVector& raw) const {
    return correction_coefficient(score(raw), bounds_);
}

}  // namespace stormgrid
