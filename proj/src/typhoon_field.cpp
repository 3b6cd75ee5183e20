#include "stormgrid/typhoon_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "stormgrid/error.hpp"

namespace stormgrid {

void TyphoonParameters::validate() const {
    auto bad = [](const std::string& what) { return Error(ErrorKind::InvalidArgument, "typhoon: " + what); };
    if (!(delta_p0_hpa > 0.0)) throw bad("deltaP0 must be > 0");
    if (!(translation_kmh >= 0.0)) throw bad("vT must be >= 0");
    if (!(heading_deg >= 0.0 && heading_deg < 360.0)) throw bad("heading must be in [0, 360)");
    if (!(dt_min > 0.0)) throw bad("dt must be > 0");
    if (!(batts_k > 0.0)) throw bad("K must be > 0");
}

namespace {

double number_or(const KeyValues& kv, const std::string& key, double fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : parse_number(it->second, key);
}

double required_number(const KeyValues& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error(ErrorKind::ParseError, "missing key '" + key + "'");
    return parse_number(it->second, key);
}

}  // namespace

TyphoonParameters typhoon_from_key_values(const KeyValues& kv) {
    TyphoonParameters p;
    p.delta_p0_hpa = required_number(kv, "deltaP0_hPa");
    p.heading_deg = wrap_degrees(required_number(kv, "heading_deg"));
    p.translation_kmh = required_number(kv, "vT_kmh");
    p.landfall = {required_number(kv, "landfall_lat"), required_number(kv, "landfall_lon")};
    p.batts_k = number_or(kv, "K", p.batts_k);
    p.dt_min = number_or(kv, "dt_min", p.dt_min);
    p.validate();
    return p;
}

TyphoonParameters load_typhoon(const std::filesystem::path& path) {
    return typhoon_from_key_values(read_key_values(path));
}

double central_pressure(const TyphoonParameters& params, double t_hours) {
    const double decay = 0.02 + 0.02 * std::sin(deg_to_rad(params.heading_deg));
    return std::max(0.0, params.delta_p0_hpa - decay * t_hours);
}

double peak_wind_speed(double batts_k, double pressure_hpa, double translation_kmh) {
    return 0.865 * batts_k * std::sqrt(std::max(0.0, pressure_hpa)) + 0.5 * (translation_kmh / 3.6);
}

double max_wind_radius_km(double pressure_hpa, double center_lat_deg) {
    return std::exp(2.63 - 5.086e-5 * pressure_hpa * pressure_hpa + 0.0395 * center_lat_deg);
}

LatLon track_position(const TyphoonParameters& params, double t_hours) {
    const double dist = params.translation_kmh * t_hours;
    const double h = deg_to_rad(params.heading_deg);
    return LocalFrame(params.landfall).to_geo({dist * std::sin(h), dist * std::cos(h)});
}

TyphoonState storm_state(const TyphoonParameters& params, double t_hours) {
    TyphoonState s;
    s.t_hours = t_hours;
    s.center = track_position(params, t_hours);
    s.pressure_hpa = central_pressure(params, t_hours);
    if (s.dissipated()) {
        s.vmax_ms = 0.0;
    } else {
        s.vmax_ms = peak_wind_speed(params.batts_k, s.pressure_hpa, params.translation_kmh);
    }
    s.rmax_km = max_wind_radius_km(s.pressure_hpa, s.center.lat);
    return s;
}

double radial_wind_speed(double vmax_ms, double rmax_km, double distance_km) {
    if (distance_km <= rmax_km) return vmax_ms * distance_km / rmax_km;
    return vmax_ms * std::pow(rmax_km / distance_km, 0.6);
}

WindSample wind_at(const TyphoonState& state, LatLon point) {
    const double d = haversine_km(state.center, point);
    WindSample w;
    w.speed_ms = radial_wind_speed(state.vmax_ms, state.rmax_km, d);
    if (d > 0.0) {
        const double radial = bearing_deg(state.center, point);
        w.direction_deg = wrap_degrees(state.center.lat >= 0.0 ? radial - 90.0 : radial + 90.0);
    }
    return w;
}

std::vector<TyphoonState> simulate_track(const TyphoonParameters& params, const GeoBox& region, double max_hours) {
    params.validate();
    std::vector<TyphoonState> states;
    const LatLon anchor = region.center();
    double previous_distance = std::numeric_limits<double>::infinity();
    const double dt = params.dt_hours();
    for (long step = 0;; ++step) {
        const double t = static_cast<double>(step) * dt;
        if (t >= max_hours) break;
        auto state = storm_state(params, t);
        if (state.dissipated()) break;
        const double distance = haversine_km(state.center, anchor);
        const bool outside = !region.inflated(3.0 * state.rmax_km).contains(state.center);
        if (outside && distance >= previous_distance) break;
        previous_distance = distance;
        states.push_back(state);
    }
    return states;
}

// --- marginals ------------------------------------------------------------

namespace {

double normal_pdf(double x, double mu, double sigma) {
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

double normal_cdf(double x, double mu, double sigma) {
    return 0.5 * std::erfc(-(x - mu) / (sigma * std::numbers::sqrt2));
}

}  // namespace

double Marginal::pdf(double x) const {
    switch (kind) {
    case DistributionKind::Uniform:
        return (x >= uniform_lo && x <= uniform_hi) ? 1.0 / (uniform_hi - uniform_lo) : 0.0;
    case DistributionKind::LogNormal: {
        if (x <= 0.0) return 0.0;
        const auto& c = components.front();
        return normal_pdf(std::log(x), c.mu, c.sigma) / x;
    }
    case DistributionKind::Normal:
    case DistributionKind::NormalMixture: {
        double total = 0.0;
        for (const auto& c : components) total += c.weight * normal_pdf(x, c.mu, c.sigma);
        return total;
    }
    }
    return 0.0;
}

double Marginal::cdf(double x) const {
    switch (kind) {
    case DistributionKind::Uniform:
        return std::clamp((x - uniform_lo) / (uniform_hi - uniform_lo), 0.0, 1.0);
    case DistributionKind::LogNormal: {
        if (x <= 0.0) return 0.0;
        const auto& c = components.front();
        return normal_cdf(std::log(x), c.mu, c.sigma);
    }
    case DistributionKind::Normal:
    case DistributionKind::NormalMixture: {
        double total = 0.0;
        for (const auto& c : components) total += c.weight * normal_cdf(x, c.mu, c.sigma);
        return total;
    }
    }
    return 0.0;
}

std::pair<double, double> Marginal::support() const {
    double a = 0.0;
    double b = 0.0;
    switch (kind) {
    case DistributionKind::Uniform:
        a = uniform_lo;
        b = uniform_hi;
        break;
    case DistributionKind::LogNormal:
        a = std::exp(components.front().mu - 4.0 * components.front().sigma);
        b = std::exp(components.front().mu + 4.0 * components.front().sigma);
        break;
    case DistributionKind::Normal:
    case DistributionKind::NormalMixture:
        a = std::numeric_limits<double>::infinity();
        b = -a;
        for (const auto& c : components) {
            a = std::min(a, c.mu - 4.0 * c.sigma);
            b = std::max(b, c.mu + 4.0 * c.sigma);
        }
        break;
    }
    return {lo.value_or(a), hi.value_or(b)};
}

void Marginal::validate() const {
    auto bad = [](const std::string& what) { return Error(ErrorKind::InvalidArgument, "marginal: " + what); };
    if (bins < 1) throw bad("bins must be >= 1");
    if (kind == DistributionKind::Uniform) {
        if (!(uniform_hi > uniform_lo)) throw bad("uniform requires lo < hi");
    } else {
        if (components.empty()) throw bad("no components");
        double wsum = 0.0;
        for (const auto& c : components) {
            if (!(c.sigma > 0.0)) throw bad("sigma must be > 0");
            if (!(c.weight > 0.0)) throw bad("component weight must be > 0");
            wsum += c.weight;
        }
        if (std::abs(wsum - 1.0) > 1e-9) throw bad("mixture weights must sum to 1");
    }
    const auto [a, b] = support();
    if (!(b > a)) throw bad("empty truncation range");
}

Marginal Marginal::log_normal(double mu_log, double sigma_log, int bins) {
    Marginal m;
    m.kind = DistributionKind::LogNormal;
    m.components = {{mu_log, sigma_log, 1.0}};
    m.bins = bins;
    return m;
}

Marginal Marginal::normal(double mu, double sigma, int bins) {
    Marginal m;
    m.kind = DistributionKind::Normal;
    m.components = {{mu, sigma, 1.0}};
    m.bins = bins;
    return m;
}

Marginal Marginal::mixture(std::vector<NormalComponent> components, int bins) {
    Marginal m;
    m.kind = DistributionKind::NormalMixture;
    m.components = std::move(components);
    m.bins = bins;
    return m;
}

Marginal Marginal::uniform(double lo, double hi, int bins) {
    Marginal m;
    m.kind = DistributionKind::Uniform;
    m.uniform_lo = lo;
    m.uniform_hi = hi;
    m.bins = bins;
    return m;
}

namespace {

template <class F>
double simpson(F&& f, double a, double b, int intervals) {
    const double h = (b - a) / intervals;
    double sum = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

}  // namespace

std::vector<ScenarioBin> discretize_marginal(const Marginal& marginal) {
    marginal.validate();
    const auto [a, b] = marginal.support();
    const double total = marginal.cdf(b) - marginal.cdf(a);
    if (!(total > 0.0)) throw Error(ErrorKind::ZeroMassBin, "marginal has no mass on its truncation range");
    const double width = (b - a) / marginal.bins;
    std::vector<ScenarioBin> out;
    for (int i = 0; i < marginal.bins; ++i) {
        ScenarioBin bin;
        bin.lo = a + i * width;
        bin.hi = (i + 1 == marginal.bins) ? b : a + (i + 1) * width;
        const double mass = marginal.cdf(bin.hi) - marginal.cdf(bin.lo);
        if (!(mass > 1e-15)) {
            throw Error(ErrorKind::ZeroMassBin, "bin [" + format_number(bin.lo) + ", " + format_number(bin.hi) +
                                                    "] has zero probability mass");
        }
        bin.probability = mass / total;
        const double weighted = simpson([&](double x) { return x * marginal.pdf(x); }, bin.lo, bin.hi, 256);
        const double local = simpson([&](double x) { return marginal.pdf(x); }, bin.lo, bin.hi, 256);
        bin.representative = local > 0.0 ? weighted / local : 0.5 * (bin.lo + bin.hi);
        out.push_back(bin);
    }
    // Renormalize once more so the masses sum to one to rounding.
    double sum = 0.0;
    for (const auto& bin : out) sum += bin.probability;
    for (auto& bin : out) bin.probability /= sum;
    return out;
}

namespace {

Marginal marginal_from(const KeyValues& kv, const std::string& prefix) {
    auto get = [&](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(prefix + "." + key);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };
    auto num = [&](const std::string& key) {
        auto v = get(key);
        if (!v) throw Error(ErrorKind::ParseError, "missing key '" + prefix + "." + key + "'");
        return parse_number(*v, prefix + "." + key);
    };
    const auto dist = get("distribution").value_or("normal");
    const int bins = get("bins") ? parse_int(*get("bins"), prefix + ".bins") : 1;
    Marginal m;
    if (dist == "lognormal") {
        m = Marginal::log_normal(num("mu"), num("sigma"), bins);
    } else if (dist == "normal") {
        m = Marginal::normal(num("mu"), num("sigma"), bins);
    } else if (dist == "normal_mixture" || dist == "binormal") {
        const double w1 = num("weight1");
        m = Marginal::mixture({{num("mu1"), num("sigma1"), w1}, {num("mu2"), num("sigma2"), 1.0 - w1}}, bins);
    } else if (dist == "uniform") {
        m = Marginal::uniform(num("lo"), num("hi"), bins);
    } else {
        throw Error(ErrorKind::ParseError, prefix + ".distribution: unknown '" + dist + "'");
    }
    if (dist != "uniform") {
        if (get("lo")) m.lo = num("lo");
        if (get("hi")) m.hi = num("hi");
    }
    m.validate();
    return m;
}

}  // namespace

ScenarioMarginals marginals_from_key_values(const KeyValues& kv) {
    return {marginal_from(kv, "pressure"), marginal_from(kv, "translation"), marginal_from(kv, "heading")};
}

ScenarioMarginals load_marginals(const std::filesystem::path& path) {
    return marginals_from_key_values(read_key_values(path));
}

double ScenarioSet::total_probability() const {
    double sum = 0.0;
    for (const auto& s : scenarios) sum += s.probability;
    return sum;
}

ScenarioSet enumerate_scenarios(const ScenarioMarginals& marginals, const TyphoonParameters& base) {
    const auto pressure = discretize_marginal(marginals.pressure);
    const auto speed = discretize_marginal(marginals.translation);
    const auto heading = discretize_marginal(marginals.heading);
    ScenarioSet set;
    set.marginals = marginals;
    for (std::size_t i = 0; i < pressure.size(); ++i) {
        for (std::size_t j = 0; j < speed.size(); ++j) {
            for (std::size_t k = 0; k < heading.size(); ++k) {
                Scenario s;
                s.params = base;
                s.params.delta_p0_hpa = pressure[i].representative;
                s.params.translation_kmh = speed[j].representative;
                s.params.heading_deg = wrap_degrees(heading[k].representative);
                s.params.validate();
                s.probability = pressure[i].probability * speed[j].probability * heading[k].probability;
                s.label = "w" + std::to_string(i) + "-" + std::to_string(j) + "-" + std::to_string(k);
                set.scenarios.push_back(std::move(s));
            }
        }
    }
    return set;
}

ScenarioSet single_scenario(const TyphoonParameters& params) {
    params.validate();
    ScenarioSet set;
    set.scenarios.push_back({params, 1.0, "base"});
    set.marginals.pressure = Marginal::uniform(params.delta_p0_hpa - 0.5, params.delta_p0_hpa + 0.5, 1);
    set.marginals.translation = Marginal::uniform(params.translation_kmh, params.translation_kmh + 1.0, 1);
    set.marginals.heading = Marginal::uniform(params.heading_deg, params.heading_deg + 1.0, 1);
    return set;
}

}  // namespace stormgrid
