#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stormgrid/geo.hpp"
#include "stormgrid/text_io.hpp"

namespace stormgrid {

/// Batts-model storm description. The track is a straight line in the local
/// tangent plane of the landfall point.
struct TyphoonParameters {
    double delta_p0_hpa = 58.0;      // initial central pressure difference
    double heading_deg = 0.0;        // movement direction, clockwise from north
    double translation_kmh = 30.0;   // forward speed
    LatLon landfall{21.8, 112.7};
    double batts_k = 6.93;           // sqrt(hPa) -> m/s
    double dt_min = 10.0;            // simulation step

    void validate() const;
    double dt_hours() const { return dt_min / 60.0; }
};

TyphoonParameters typhoon_from_key_values(const KeyValues& kv);
TyphoonParameters load_typhoon(const std::filesystem::path& path);

struct TyphoonState {
    double t_hours = 0.0;
    LatLon center;
    double pressure_hpa = 0.0;  // P(t); the same quantity drives peak wind and rmax
    double vmax_ms = 0.0;
    double rmax_km = 0.0;

    bool dissipated() const { return pressure_hpa <= 0.0; }
};

struct WindSample {
    double speed_ms = 0.0;
    double direction_deg = 0.0;  // heading the air moves toward, clockwise from north
};

/// P(t) = max(0, dP0 - (0.02 + 0.02 sin(heading)) t), t in hours.
double central_pressure(const TyphoonParameters& params, double t_hours);

/// 0.865 K sqrt(P) + 0.5 vT, vT converted from km/h to m/s.
double peak_wind_speed(double batts_k, double pressure_hpa, double translation_kmh);

/// exp(2.63 - 5.086e-5 P^2 + 0.0395 lat), km.
double max_wind_radius_km(double pressure_hpa, double center_lat_deg);

LatLon track_position(const TyphoonParameters& params, double t_hours);

TyphoonState storm_state(const TyphoonParameters& params, double t_hours);

/// Radial profile: linear inside the eye wall, (rmax/d)^0.6 decay outside.
double radial_wind_speed(double vmax_ms, double rmax_km, double distance_km);

/// Tangential cyclonic flow: counterclockwise in the northern hemisphere,
/// clockwise in the southern.
WindSample wind_at(const TyphoonState& state, LatLon point);

/// Time-stepped track at dt from landfall. Stops when the storm dissipates or
/// once the centre is outside `region` inflated by 3 rmax and moving away
/// from it, with `max_hours` as a hard cap. The returned states are the
/// left endpoints of each integration step.
std::vector<TyphoonState> simulate_track(const TyphoonParameters& params, const GeoBox& region,
                                         double max_hours = 240.0);

// --- scenario enumeration -------------------------------------------------

enum class DistributionKind { LogNormal, Normal, NormalMixture, Uniform };

struct NormalComponent {
    double mu = 0.0;
    double sigma = 1.0;
    double weight = 1.0;
};

/// One parameter marginal, truncated to [lo, hi] and cut into equal-width bins.
/// For LogNormal the component's mu/sigma refer to ln(x).
struct Marginal {
    DistributionKind kind = DistributionKind::Normal;
    std::vector<NormalComponent> components;
    double uniform_lo = 0.0;
    double uniform_hi = 1.0;
    std::optional<double> lo;
    std::optional<double> hi;
    int bins = 1;

    double pdf(double x) const;
    double cdf(double x) const;
    /// Explicit truncation range, or a +-4 sigma default.
    std::pair<double, double> support() const;
    void validate() const;

    static Marginal log_normal(double mu_log, double sigma_log, int bins);
    static Marginal normal(double mu, double sigma, int bins);
    static Marginal mixture(std::vector<NormalComponent> components, int bins);
    static Marginal uniform(double lo, double hi, int bins);
};

struct ScenarioBin {
    double lo = 0.0;
    double hi = 0.0;
    double probability = 0.0;      // normalized bin mass
    double representative = 0.0;   // conditional mean within the bin
};

/// Bin masses by CDF differences, renormalized over the truncation range.
std::vector<ScenarioBin> discretize_marginal(const Marginal& marginal);

struct ScenarioMarginals {
    Marginal pressure;     // dP0, hPa
    Marginal translation;  // vT, km/h
    Marginal heading;      // degrees; representatives wrapped into [0, 360)
};

ScenarioMarginals marginals_from_key_values(const KeyValues& kv);
ScenarioMarginals load_marginals(const std::filesystem::path& path);

struct Scenario {
    TyphoonParameters params;
    double probability = 0.0;
    std::string label;
};

struct ScenarioSet {
    std::vector<Scenario> scenarios;
    ScenarioMarginals marginals;

    double total_probability() const;
};

/// Cartesian product of the per-dimension bins; landfall, K and dt are taken
/// from `base`.
ScenarioSet enumerate_scenarios(const ScenarioMarginals& marginals, const TyphoonParameters& base);

/// A one-scenario set carrying `params` with probability 1.
ScenarioSet single_scenario(const TyphoonParameters& params);

}  // namespace stormgrid
