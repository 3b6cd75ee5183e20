#pragma once

#include <span>
#include <string>
#include <vector>

#include "stormgrid/feature_engine.hpp"
#include "stormgrid/grid_case.hpp"
#include "stormgrid/typhoon_field.hpp"

namespace stormgrid {

/// Line-section hazard per hour: exp(11 v/vd_line - 18) * span_km.
double line_section_rate(double wind_ms, double vd_line_ms, double span_km);

/// Tower failure rate: 0 below vd_tower, exp(gamma (v - 2 vd_tower)) up to
/// 2 vd_tower, 1 beyond.
double tower_rate(double wind_ms, double vd_tower_ms, double gamma);

enum class UnitKind { Line, Tower };

/// Left Riemann sum of the hazard over steps of `dt_hours`:
/// line 1 - exp(-sum(l) dt); tower 1 - exp(-sum(l/(1-l)) dt), with l capped
/// at 1 - 1e-9 and any l >= 1 meaning certain collapse.
double cumulative_unit_probability(std::span<const double> rates, double dt_hours, UnitKind kind);

/// Series combination 1 - prod(1 - p_i).
double corridor_probability(std::span<const double> unit_probabilities);

/// min(1, k p).
double corrected_probability(double p, double k);

struct CorridorUnits {
    std::vector<TowerLineUnit> units;
    std::vector<CellAttributes> terrain;  // one per unit
};

/// Corridors cut into tower-line units with terrain attached. Read-only
/// after construction.
struct DiscretizedCase {
    std::vector<CorridorUnits> corridors;  // parallel to NetworkCase::corridors
    std::size_t fallback_cells = 0;        // units that landed outside the raster
    GeoBox region;

    static DiscretizedCase build(const NetworkCase& network, double spacing_m, const TerrainGrid* terrain);
    std::size_t unit_count() const;
};

struct UnitOutcome {
    int index = 0;
    double p_line = 0.0;
    double p_tower = 0.0;
    double p_model = 0.0;
    double max_wind_ms = 0.0;
    double wind_angle_deg = 0.0;
    FeatureVector features{};
    double score = 0.0;
    double k = 1.0;
    bool k_clamped = false;
    double p_corrected = 0.0;
};

struct CorridorOutcome {
    int corridor_id = 0;
    double p_model = 0.0;
    double p_comprehensive = 0.0;
    std::vector<UnitOutcome> units;
    std::vector<double> model_series;          // cumulative, one entry per step
    std::vector<double> comprehensive_series;
};

struct FailureProfile {
    std::string scenario;
    std::vector<double> times_h;  // end time of each step
    std::vector<CorridorOutcome> corridors;

    std::vector<double> corridor_probabilities(bool comprehensive) const;
};

struct ProfileOptions {
    double max_hours = 240.0;
    bool record_series = false;
    bool keep_units = true;
    /// Compute features and scores but pin every k to 1.
    bool force_unit_coefficients = false;
};

/// Step the storm, sample wind at every tower, accumulate unit
/// probabilities, apply per-unit correction coefficients (k = 1 when
/// `corrections` is null) and fold into corridor probabilities.
FailureProfile scenario_failure_profile(const NetworkCase& network, const DiscretizedCase& units,
                                        const TyphoonParameters& storm, const CorrectionModel* corrections,
                                        const ProfileOptions& options = {});

}  // namespace stormgrid
