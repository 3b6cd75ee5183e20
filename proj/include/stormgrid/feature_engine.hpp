#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stormgrid {

/// Canonical feature order used throughout the library. Files that list
/// features in another order are re-aligned by name, never by position.
enum class Feature : std::size_t { MaxWind, RainIntensity, Altitude, Slope, WindAngle, DesignWind, OpTime };

inline constexpr std::size_t kFeatureCount = 7;
using FeatureVector = std::array<double, kFeatureCount>;

const std::array<std::string_view, kFeatureCount>& feature_names();
std::string_view feature_name(Feature f);
std::optional<Feature> feature_from_name(std::string_view name);
std::vector<std::string> canonical_feature_order();

enum class Sign { Positive, Negative };

struct FeatureRange {
    double min = 0.0;
    double max = 1.0;
    Sign sign = Sign::Positive;
};

/// Table ranges for the seven features. Operation time defaults to a
/// negative sign; pass `op_time_positive` to treat older assets as more
/// fragile instead.
std::vector<FeatureRange> default_feature_ranges(bool op_time_positive = false);

/// 10-minute rainfall intensity (mm/h) from a 24 h total (mm): 27.08 R^0.6021.
double rain_10min(double r24h_mm);

/// Clamp into the range, then map to [0, 1] so that 1 is the hazardous end:
/// (x - min)/(max - min) for '+' features, (max - x)/(max - min) for '-'.
double normalize(double x, const FeatureRange& range);

struct ScoreBounds {
    double min = 0.0;
    double max = 1.0;
};

/// Composite score at the two boundary assignments (every feature at its
/// hazardous end, every feature at its benign end). Throws
/// NondegenerateRangeRequired if any range has min >= max.
ScoreBounds score_bounds(std::span<const double> weights, std::span<const FeatureRange> ranges);

double composite_score(std::span<const double> weights, std::span<const double> normalized);

struct Coefficient {
    double k = 1.0;
    bool clamped = false;  // score fell outside the bounds and was pulled back in
};

/// k = 0.5 (W - Wmin)/(Wmax - Wmin) + 0.9, so k spans [0.9, 1.4].
Coefficient correction_coefficient(double score, ScoreBounds bounds);

/// Angle between a wind heading and a span bearing, folded into [0, 180].
double wind_span_angle(double wind_direction_deg, double span_bearing_deg);

/// Raw (unclamped) feature vector for one tower-line unit.
FeatureVector unit_features(double max_wind_ms, double rain24h_mm, double altitude_m, double slope_deg,
                            double wind_angle_deg, double design_wind_ms, double op_years);

/// Weights plus ranges, with the score bounds precomputed.
class CorrectionModel {
public:
    CorrectionModel(std::vector<double> weights, std::vector<FeatureRange> ranges);

    FeatureVector normalized(const FeatureVector& raw) const;
    double score(const FeatureVector& raw) const;
    Coefficient coefficient(const FeatureVector& raw) const;

    const std::vector<double>& weights() const { return weights_; }
    const std::vector<FeatureRange>& ranges() const { return ranges_; }
    ScoreBounds bounds() const { return bounds_; }

private:
    std::vector<double> weights_;
    std::vector<FeatureRange> ranges_;
    ScoreBounds bounds_;
};

}  // namespace stormgrid
