#include "stormgrid/failure_model.hpp"

#include <algorithm>
#include <cmath>

#include "stormgrid/error.hpp"

namespace stormgrid {

double line_section_rate(double wind_ms, double vd_line_ms, double span_km) {
    return std::exp(11.0 * wind_ms / vd_line_ms - 18.0) * span_km;
}

double tower_rate(double wind_ms, double vd_tower_ms, double gamma) {
    if (wind_ms < vd_tower_ms) return 0.0;
    if (wind_ms >= 2.0 * vd_tower_ms) return 1.0;
    return std::clamp(std::exp(gamma * (wind_ms - 2.0 * vd_tower_ms)), 0.0, 1.0);
}

namespace {

constexpr double kTowerRateCap = 1.0 - 1e-9;

double tower_hazard(double rate) {
    const double l = std::min(rate, kTowerRateCap);
    return l / (1.0 - l);
}

}  // namespace

double cumulative_unit_probability(std::span<const double> rates, double dt_hours, UnitKind kind) {
    if (!(dt_hours > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be > 0");
    double integral = 0.0;
    for (double l : rates) {
        if (kind == UnitKind::Line) {
            integral += l * dt_hours;
        } else {
            if (l >= 1.0) return 1.0;
            integral += tower_hazard(l) * dt_hours;
        }
    }
    return -std::expm1(-integral);
}

double corridor_probability(std::span<const double> unit_probabilities) {
    double survive = 1.0;
    for (double p : unit_probabilities) survive *= (1.0 - p);
    return 1.0 - survive;
}

double corrected_probability(double p, double k) { return std::min(1.0, k * p); }

DiscretizedCase DiscretizedCase::build(const NetworkCase& network, double spacing_m, const TerrainGrid* terrain) {
    DiscretizedCase out;
    out.region = network.extent();
    for (const auto& corridor : network.corridors) {
        CorridorUnits cu;
        cu.units = discretize_corridor(corridor, spacing_m);
        for (auto& unit : cu.units) {
            if (terrain) {
                auto hit = cell_lookup(*terrain, unit.tower);
                unit.cell = hit.cell;
                if (hit.fallback()) ++out.fallback_cells;
                cu.terrain.push_back(hit.attributes);
            } else {
                cu.terrain.push_back({});
            }
        }
        out.corridors.push_back(std::move(cu));
    }
    return out;
}

std::size_t DiscretizedCase::unit_count() const {
    std::size_t n = 0;
    for (const auto& c : corridors) n += c.units.size();
    return n;
}

std::vector<double> FailureProfile::corridor_probabilities(bool comprehensive) const {
    std::vector<double> out;
    out.reserve(corridors.size());
    for (const auto& c : corridors) out.push_back(comprehensive ? c.p_comprehensive : c.p_model);
    return out;
}

namespace {

struct UnitAccumulator {
    double line_integral = 0.0;
    double tower_integral = 0.0;
    bool tower_down = false;
    double max_wind = 0.0;
    double direction_at_max = 0.0;

    double p_line() const { return -std::expm1(-line_integral); }
    double p_tower() const { return tower_down ? 1.0 : -std::expm1(-tower_integral); }
    double p_unit() const { return 1.0 - (1.0 - p_line()) * (1.0 - p_tower()); }
};

}  // namespace

FailureProfile scenario_failure_profile(const NetworkCase& network, const DiscretizedCase& units,
                                        const TyphoonParameters& storm, const CorrectionModel* corrections,
                                        const ProfileOptions& options) {
    if (units.corridors.size() != network.corridors.size())
        throw Error(ErrorKind::DimensionMismatch, "discretized case does not match the network");
    for (const auto& c : network.corridors) {
        if (!(c.vd_line_ms > 0.0) || !(c.vd_tower_ms > 0.0) || !(c.gamma > 0.0)) {
            throw Error(ErrorKind::InvalidArgument,
                        "corridor " + std::to_string(c.id) + ": design wind speeds and gamma must be > 0");
        }
    }
    const auto track = simulate_track(storm, units.region, options.max_hours);
    const double dt = storm.dt_hours();

    std::vector<std::vector<UnitAccumulator>> acc(units.corridors.size());
    // history[c][step][unit] = unit model probability after that step
    std::vector<std::vector<std::vector<double>>> history(units.corridors.size());
    for (std::size_t c = 0; c < units.corridors.size(); ++c) acc[c].resize(units.corridors[c].units.size());

    for (const auto& state : track) {
        for (std::size_t c = 0; c < units.corridors.size(); ++c) {
            const auto& corridor = network.corridors[c];
            const auto& cu = units.corridors[c];
            for (std::size_t u = 0; u < cu.units.size(); ++u) {
                const auto& unit = cu.units[u];
                const auto wind = wind_at(state, unit.tower);
                auto& a = acc[c][u];
                a.line_integral += line_section_rate(wind.speed_ms, corridor.vd_line_ms, unit.span_km) * dt;
                const double tr = tower_rate(wind.speed_ms, corridor.vd_tower_ms, corridor.gamma);
                if (tr >= 1.0) {
                    a.tower_down = true;
                } else {
                    a.tower_integral += tower_hazard(tr) * dt;
                }
                if (wind.speed_ms > a.max_wind) {
                    a.max_wind = wind.speed_ms;
                    a.direction_at_max = wind.direction_deg;
                }
            }
            if (options.record_series) {
                std::vector<double> snapshot;
                snapshot.reserve(acc[c].size());
                for (const auto& a : acc[c]) snapshot.push_back(a.p_unit());
                history[c].push_back(std::move(snapshot));
            }
        }
    }

    FailureProfile profile;
    for (std::size_t i = 0; i < track.size(); ++i) profile.times_h.push_back(static_cast<double>(i + 1) * dt);
    for (std::size_t c = 0; c < units.corridors.size(); ++c) {
        const auto& corridor = network.corridors[c];
        const auto& cu = units.corridors[c];
        CorridorOutcome outcome;
        outcome.corridor_id = corridor.id;
        std::vector<double> ks(cu.units.size(), 1.0);
        std::vector<double> model(cu.units.size());
        std::vector<double> corrected(cu.units.size());
        for (std::size_t u = 0; u < cu.units.size(); ++u) {
            const auto& a = acc[c][u];
            UnitOutcome uo;
            uo.index = cu.units[u].index;
            uo.p_line = a.p_line();
            uo.p_tower = a.p_tower();
            uo.p_model = a.p_unit();
            uo.max_wind_ms = a.max_wind;
            uo.wind_angle_deg = wind_span_angle(a.direction_at_max, cu.units[u].span_bearing_deg);
            const auto& cell = cu.terrain[u];
            uo.features = unit_features(a.max_wind, cell.rain24h_mm, cell.altitude_m, cell.slope_deg,
                                        uo.wind_angle_deg, corridor.vd_line_ms, corridor.op_years);
            if (corrections) {
                uo.score = corrections->score(uo.features);
                const auto coef = correction_coefficient(uo.score, corrections->bounds());
                if (!options.force_unit_coefficients) {
                    uo.k = coef.k;
                    uo.k_clamped = coef.clamped;
                }
            }
            uo.p_corrected = corrected_probability(uo.p_model, uo.k);
            ks[u] = uo.k;
            model[u] = uo.p_model;
            corrected[u] = uo.p_corrected;
            if (options.keep_units) outcome.units.push_back(uo);
        }
        outcome.p_model = corridor_probability(model);
        outcome.p_comprehensive = corridor_probability(corrected);
        if (options.record_series) {
            for (const auto& snapshot : history[c]) {
                double survive_model = 1.0;
                double survive_corrected = 1.0;
                for (std::size_t u = 0; u < snapshot.size(); ++u) {
                    survive_model *= 1.0 - snapshot[u];
                    survive_corrected *= 1.0 - corrected_probability(snapshot[u], ks[u]);
                }
                outcome.model_series.push_back(1.0 - survive_model);
                outcome.comprehensive_series.push_back(1.0 - survive_corrected);
            }
        }
        profile.corridors.push_back(std::move(outcome));
    }
    return profile;
}

}  // namespace stormgrid
