#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "stormgrid/error.hpp"
#include "stormgrid/failure_model.hpp"

using namespace stormgrid;

namespace {

// Two-bus network with a single 3 km corridor running north, close to the landfall.
NetworkCase tiny_network(double vd_line = 45, double vd_tower = 50) {
    const double km = kEarthRadiusKm * M_PI / 180.0;
    NetworkCase net;
    net.buses = {{1, 0}, {2, 40}};
    net.generators = {{1, 100, 0}};
    Corridor c;
    c.id = 5;
    c.from_bus = 1;
    c.to_bus = 2;
    c.reactance_pu = 0.1;
    c.limit_mw = 100;
    c.vd_line_ms = vd_line;
    c.vd_tower_ms = vd_tower;
    c.op_years = 12;
    c.polyline = {{22.0, 112.5}, {22.0 + 3.0 / km, 112.5}};
    net.corridors = {c};
    finalize_case(net);
    return net;
}

TyphoonParameters storm() {
    TyphoonParameters p;
    p.delta_p0_hpa = 70;
    p.heading_deg = 315;
    p.translation_kmh = 25;
    p.landfall = {21.8, 112.7};
    return p;
}

// Independent left-Riemann accumulation of Eqs. for one unit.
double oracle_unit(const TyphoonParameters& p, const std::vector<TyphoonState>& track, LatLon tower, double span_km,
                   double vd_line, double vd_tower, double gamma) {
    double line = 0, tower_int = 0;
    bool down = false;
    for (const auto& s : track) {
        const double v = wind_at(s, tower).speed_ms;
        line += std::exp(11.0 * v / vd_line - 18.0) * span_km * p.dt_hours();
        double lam = v < vd_tower ? 0.0 : (v >= 2 * vd_tower ? 1.0 : std::exp(gamma * (v - 2 * vd_tower)));
        if (lam >= 1.0) down = true;
        lam = std::min(lam, 1.0 - 1e-9);
        tower_int += lam / (1.0 - lam) * p.dt_hours();
    }
    const double pl = 1.0 - std::exp(-line);
    const double pt = down ? 1.0 : 1.0 - std::exp(-tower_int);
    return 1.0 - (1.0 - pl) * (1.0 - pt);
}

}  // namespace

TEST_CASE("line section rate") {
    CHECK(line_section_rate(40, 40, 1) == doctest::Approx(9.118819655545162e-4).epsilon(1e-12));
    CHECK(line_section_rate(0, 40, 1) == doctest::Approx(1.522997974471263e-8).epsilon(1e-12));
    CHECK(line_section_rate(80, 40, 0.5) == doctest::Approx(27.29907501657212).epsilon(1e-12));
    double prev = 0;
    for (double v = 0; v < 100; v += 0.5) {
        const double r = line_section_rate(v, 43, 0.5);
        CHECK(r > prev);
        CHECK(line_section_rate(v, 43, 1.0) == doctest::Approx(2 * r).epsilon(1e-14));
        prev = r;
    }
}

TEST_CASE("tower rate branches") {
    const double vd = 40, g = std::log(20.0) / vd;
    CHECK(tower_rate(20, vd, g) == 0.0);
    CHECK(tower_rate(39.999, vd, g) == 0.0);
    CHECK(tower_rate(vd, vd, g) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(tower_rate(60, vd, g) == doctest::Approx(std::exp(g * (60 - 80))));
    CHECK(tower_rate(80, vd, g) == 1.0);
    CHECK(tower_rate(1e6, vd, g) == 1.0);
    CHECK(tower_rate(80 - 1e-12, vd, g) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cumulative unit probability") {
    const std::vector<double> zeros(50, 0.0);
    CHECK(cumulative_unit_probability(zeros, 1.0 / 6, UnitKind::Line) == 0.0);
    CHECK(cumulative_unit_probability(zeros, 1.0 / 6, UnitKind::Tower) == 0.0);
    const std::vector<double> constant(60, 0.1);
    CHECK(cumulative_unit_probability(constant, 1.0 / 6, UnitKind::Line) ==
          doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-12));
    const std::vector<double> certain{1.0};
    CHECK(cumulative_unit_probability(certain, 1.0 / 6, UnitKind::Tower) == 1.0);
    const std::vector<double> half{0.5, 0.5};
    CHECK(cumulative_unit_probability(half, 0.5, UnitKind::Tower) == doctest::Approx(1 - std::exp(-1.0)));
    CHECK_THROWS_AS(cumulative_unit_probability(half, 0.0, UnitKind::Line), Error);

    // extending the horizon never lowers the probability
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 0.9);
    std::vector<double> rates;
    double prev = 0;
    for (int i = 0; i < 200; ++i) {
        rates.push_back(u(rng));
        const double p = cumulative_unit_probability(rates, 1.0 / 6, UnitKind::Tower);
        CHECK(p >= prev);
        prev = p;
    }
}

TEST_CASE("corridor probability") {
    CHECK(corridor_probability(std::vector<double>{0, 0, 0}) == 0.0);
    CHECK(corridor_probability(std::vector<double>{0.3}) == doctest::Approx(0.3));
    CHECK(corridor_probability(std::vector<double>{0.1, 0.2}) == doctest::Approx(0.28).epsilon(1e-14));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 0.2);
    std::vector<double> ps(40);
    for (auto& p : ps) p = u(rng);
    const double base = corridor_probability(ps);
    auto shuffled = ps;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(corridor_probability(shuffled) == doctest::Approx(base).epsilon(1e-14));
    auto bumped = ps;
    bumped[7] += 0.05;
    CHECK(corridor_probability(bumped) >= base);

    std::vector<double> tiny(100);
    double sum = 0;
    for (auto& p : tiny) {
        p = 1e-6 * u(rng) * 5;
        sum += p;
    }
    CHECK(std::abs(corridor_probability(tiny) - sum) <= sum * sum);
}

TEST_CASE("corrected probability") {
    CHECK(corrected_probability(0.2, 1.4) == doctest::Approx(0.28));
    CHECK(corrected_probability(0.9, 1.4) == 1.0);
    CHECK(corrected_probability(0.2, 0.9) == doctest::Approx(0.18));
}

TEST_CASE("scenario profile matches a direct accumulation") {
    const auto net = tiny_network();
    const auto units = DiscretizedCase::build(net, 500, nullptr);
    REQUIRE(units.unit_count() == 6);
    const auto p = storm();
    ProfileOptions opt;
    opt.record_series = true;
    const auto profile = scenario_failure_profile(net, units, p, nullptr, opt);
    const auto track = simulate_track(p, units.region);
    REQUIRE(profile.times_h.size() == track.size());

    const auto& c = net.corridors[0];
    std::vector<double> expected;
    for (const auto& u : units.corridors[0].units)
        expected.push_back(oracle_unit(p, track, u.tower, u.span_km, c.vd_line_ms, c.vd_tower_ms, c.gamma));
    const auto& out = profile.corridors[0];
    REQUIRE(out.units.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(out.units[i].p_model == doctest::Approx(expected[i]).epsilon(1e-12));
    CHECK(out.p_model == doctest::Approx(corridor_probability(expected)).epsilon(1e-12));
    CHECK(out.p_model > 1e-4);
    CHECK(out.p_comprehensive == out.p_model);

    for (std::size_t i = 1; i < out.model_series.size(); ++i) CHECK(out.model_series[i] >= out.model_series[i - 1]);
    CHECK(out.model_series.back() == doctest::Approx(out.p_model).epsilon(1e-12));
}

TEST_CASE("weak storms leave only the line hazard floor") {
    auto p = storm();
    p.delta_p0_hpa = 5;  // vmax far below every design speed
    const auto net = tiny_network();
    const auto units = DiscretizedCase::build(net, 500, nullptr);
    const auto profile = scenario_failure_profile(net, units, p, nullptr);
    for (const auto& u : profile.corridors[0].units) {
        CHECK(u.p_tower == 0.0);
        CHECK(u.p_line < 1e-6);
    }
}

TEST_CASE("corrections raise or lower unit probabilities within the k band") {
    const auto net = tiny_network();
    const auto units = DiscretizedCase::build(net, 500, nullptr);
    const std::vector<double> w{0.3, 0.2, 0.15, 0.1, 0.1, 0.1, 0.05};
    const CorrectionModel model(w, default_feature_ranges());
    const auto profile = scenario_failure_profile(net, units, storm(), &model);
    for (const auto& u : profile.corridors[0].units) {
        CHECK(u.k >= 0.9);
        CHECK(u.k <= 1.4);
        CHECK(u.p_corrected == doctest::Approx(std::min(1.0, u.k * u.p_model)));
        CHECK(u.k == doctest::Approx(0.9 + 0.5 * model.score(u.features)));
    }
    ProfileOptions forced;
    forced.force_unit_coefficients = true;
    const auto pinned = scenario_failure_profile(net, units, storm(), &model, forced);
    const auto plain = scenario_failure_profile(net, units, storm(), nullptr);
    CHECK(pinned.corridors[0].p_comprehensive == plain.corridors[0].p_model);
    CHECK(pinned.corridors[0].p_model == plain.corridors[0].p_model);
}

TEST_CASE("missing design speeds are rejected") {
    auto net = tiny_network();
    net.corridors[0].vd_line_ms = 0;
    const auto units = DiscretizedCase::build(net, 500, nullptr);
    CHECK_THROWS_AS(scenario_failure_profile(net, units, storm(), nullptr), Error);
}

TEST_CASE("terrain fallback is counted") {
    const auto net = tiny_network();
    TerrainGrid grid;
    grid.origin = {22.0, 112.5};
    grid.cell_km = 1.0;
    grid.default_cell = {5, 5, 1};
    grid.cells[{0, 0}] = {50, 10, 2};
    grid.cells[{1, 0}] = {60, 12, 2};
    const auto units = DiscretizedCase::build(net, 500, &grid);
    // towers at 0 .. 2.5 km north: rows 0 and 1 exist, row 2 does not
    CHECK(units.fallback_cells == 1);
    CHECK(units.corridors[0].terrain[0].altitude_m == 50);
    CHECK(units.corridors[0].terrain[2].altitude_m == 50);  // on the row edge: lower row wins
    CHECK(units.corridors[0].terrain[3].altitude_m == 60);
    CHECK(units.corridors[0].terrain[5].altitude_m == 5);
}
