#include "stormgrid/grid_case.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "stormgrid/error.hpp"
#include "stormgrid/text_io.hpp"

namespace stormgrid {

std::size_t NetworkCase::bus_index(int id) const {
    for (std::size_t i = 0; i < buses.size(); ++i)
        if (buses[i].id == id) return i;
    throw Error(ErrorKind::MissingBus, "bus " + std::to_string(id) + " does not exist");
}

std::optional<std::size_t> NetworkCase::find_corridor(int id) const {
    for (std::size_t i = 0; i < corridors.size(); ++i)
        if (corridors[i].id == id) return i;
    return std::nullopt;
}

std::size_t NetworkCase::corridor_index(int id) const {
    if (auto i = find_corridor(id)) return *i;
    throw Error(ErrorKind::UnknownCorridor, "corridor " + std::to_string(id) + " does not exist");
}

double NetworkCase::total_load_mw() const {
    return std::accumulate(buses.begin(), buses.end(), 0.0, [](double s, const Bus& b) { return s + b.load_mw; });
}

double NetworkCase::total_pmax_mw() const {
    return std::accumulate(generators.begin(), generators.end(), 0.0,
                           [](double s, const Generator& g) { return s + g.pmax_mw; });
}

GeoBox NetworkCase::extent() const {
    std::vector<LatLon> points;
    for (const auto& c : corridors) points.insert(points.end(), c.polyline.begin(), c.polyline.end());
    return GeoBox::around(points);
}

double default_tower_gamma(double vd_tower_ms) { return vd_tower_ms > 0.0 ? std::log(20.0) / vd_tower_ms : 0.0; }

void finalize_case(NetworkCase& network) {
    std::set<int> bus_ids;
    for (const auto& b : network.buses) {
        if (!bus_ids.insert(b.id).second)
            throw Error(ErrorKind::DuplicateId, "bus " + std::to_string(b.id) + " listed twice");
        if (b.load_mw < 0.0) throw Error(ErrorKind::InvalidArgument, "bus " + std::to_string(b.id) + ": negative load");
    }
    for (const auto& g : network.generators) {
        if (!bus_ids.count(g.bus))
            throw Error(ErrorKind::MissingBus, "generator references bus " + std::to_string(g.bus));
        if (g.pmin_mw < 0.0 || g.pmax_mw < g.pmin_mw)
            throw Error(ErrorKind::InvalidArgument,
                        "generator at bus " + std::to_string(g.bus) + ": need 0 <= pmin <= pmax");
    }
    std::set<int> corridor_ids;
    for (auto& c : network.corridors) {
        const std::string name = "corridor " + std::to_string(c.id);
        if (!corridor_ids.insert(c.id).second) throw Error(ErrorKind::DuplicateId, name + " listed twice");
        if (!bus_ids.count(c.from_bus))
            throw Error(ErrorKind::MissingBus, name + " references bus " + std::to_string(c.from_bus));
        if (!bus_ids.count(c.to_bus))
            throw Error(ErrorKind::MissingBus, name + " references bus " + std::to_string(c.to_bus));
        if (c.from_bus == c.to_bus) throw Error(ErrorKind::InvalidArgument, name + " starts and ends at one bus");
        if (!(c.reactance_pu > 0.0)) throw Error(ErrorKind::NonPositiveReactance, name);
        if (!(c.limit_mw > 0.0)) throw Error(ErrorKind::NonPositiveLimit, name);
        c.length_km = polyline_length_km(c.polyline);
        if (c.gamma <= 0.0) c.gamma = default_tower_gamma(c.vd_tower_ms);
    }
    if (network.total_pmax_mw() < network.total_load_mw()) {
        throw Error(ErrorKind::InsufficientGeneration, "total Pmax " + format_number(network.total_pmax_mw()) +
                                                           " MW < total load " +
                                                           format_number(network.total_load_mw()) + " MW");
    }
    // connectivity of the intact network
    if (!network.buses.empty()) {
        const std::size_t n = network.buses.size();
        std::vector<std::size_t> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        auto root = [&](std::size_t i) {
            while (parent[i] != i) i = parent[i] = parent[parent[i]];
            return i;
        };
        for (const auto& c : network.corridors)
            parent[root(network.bus_index(c.from_bus))] = root(network.bus_index(c.to_bus));
        for (std::size_t i = 1; i < n; ++i) {
            if (root(i) != root(0)) {
                throw Error(ErrorKind::DisconnectedBaseGraph, "bus " + std::to_string(network.buses[i].id) +
                                                                  " is not connected to bus " +
                                                                  std::to_string(network.buses[0].id));
            }
        }
    }
}

std::vector<LatLon> parse_polyline(std::string_view text, std::string_view context) {
    std::vector<LatLon> out;
    if (trim(text).empty()) return out;
    for (const auto& pair : split(text, ';')) {
        if (pair.empty()) continue;
        const auto parts = split(pair, ',');
        if (parts.size() != 2)
            throw Error(ErrorKind::ParseError, std::string(context) + ": polyline vertex '" + pair + "' is not lat,lon");
        out.push_back({parse_number(parts[0], context), parse_number(parts[1], context)});
    }
    return out;
}

namespace {

std::string where(const Table& t, std::size_t row) {
    return t.source + ":" + std::to_string(t.line_numbers[row]);
}

double optional_number(const Table& t, std::size_t row, std::string_view column, double fallback) {
    auto c = t.find_column(column);
    if (!c || t.rows[row][*c].empty()) return fallback;
    return parse_number(t.rows[row][*c], where(t, row));
}

}  // namespace

NetworkCase parse_case(const CaseText& text) {
    NetworkCase network;
    const auto buses = parse_table(text.buses, "buses");
    for (std::size_t r = 0; r < buses.rows.size(); ++r) {
        const auto& row = buses.rows[r];
        network.buses.push_back({parse_int(row[buses.column("id")], where(buses, r)),
                                 parse_number(row[buses.column("load_mw")], where(buses, r))});
    }
    if (!trim(text.generators).empty()) {
        const auto gens = parse_table(text.generators, "generators");
        for (std::size_t r = 0; r < gens.rows.size(); ++r) {
            const auto& row = gens.rows[r];
            network.generators.push_back({parse_int(row[gens.column("bus")], where(gens, r)),
                                          parse_number(row[gens.column("pmax_mw")], where(gens, r)),
                                          optional_number(gens, r, "pmin_mw", 0.0)});
        }
    }
    if (!trim(text.corridors).empty()) {
        const auto cor = parse_table(text.corridors, "corridors");
        for (std::size_t r = 0; r < cor.rows.size(); ++r) {
            const auto& row = cor.rows[r];
            const auto at = where(cor, r);
            Corridor c;
            c.id = parse_int(row[cor.column("id")], at);
            c.from_bus = parse_int(row[cor.column("from")], at);
            c.to_bus = parse_int(row[cor.column("to")], at);
            c.reactance_pu = parse_number(row[cor.column("x_pu")], at);
            c.limit_mw = parse_number(row[cor.column("limit_mw")], at);
            c.vd_line_ms = optional_number(cor, r, "vd_line", 0.0);
            c.vd_tower_ms = optional_number(cor, r, "vd_tower", 0.0);
            c.gamma = optional_number(cor, r, "gamma", 0.0);
            c.op_years = optional_number(cor, r, "op_years", 0.0);
            if (auto p = cor.find_column("polyline")) c.polyline = parse_polyline(row[*p], at);
            network.corridors.push_back(std::move(c));
        }
    }
    if (!trim(text.geography).empty()) {
        const auto geo = parse_table(text.geography, "geography");
        for (std::size_t r = 0; r < geo.rows.size(); ++r) {
            const auto& row = geo.rows[r];
            const int id = parse_int(row[geo.column("id")], where(geo, r));
            const auto idx = network.find_corridor(id);
            if (!idx) throw Error(ErrorKind::UnknownCorridor, where(geo, r) + ": corridor " + std::to_string(id));
            network.corridors[*idx].polyline = parse_polyline(row[geo.column("polyline")], where(geo, r));
        }
    }
    finalize_case(network);
    return network;
}

NetworkCase load_case(const CaseFiles& files) {
    CaseText text;
    text.buses = read_file(files.buses);
    text.generators = read_file(files.generators);
    text.corridors = read_file(files.corridors);
    if (files.geography) text.geography = read_file(*files.geography);
    return parse_case(text);
}

std::string canonical_serialization(const NetworkCase& network) {
    std::ostringstream out;
    out << "base_mva " << format_number(network.base_mva) << '\n';
    for (const auto& b : network.buses) out << "bus " << b.id << ' ' << format_number(b.load_mw) << '\n';
    for (const auto& g : network.generators)
        out << "gen " << g.bus << ' ' << format_number(g.pmax_mw) << ' ' << format_number(g.pmin_mw) << '\n';
    for (const auto& c : network.corridors) {
        out << "corridor " << c.id << ' ' << c.from_bus << ' ' << c.to_bus << ' ' << format_number(c.reactance_pu)
            << ' ' << format_number(c.limit_mw) << ' ' << format_number(c.vd_line_ms) << ' '
            << format_number(c.vd_tower_ms) << ' ' << format_number(c.gamma) << ' ' << format_number(c.op_years);
        for (const auto& p : c.polyline) out << ' ' << format_number(p.lat) << ',' << format_number(p.lon);
        out << '\n';
    }
    return out.str();
}

std::string case_digest(const NetworkCase& network) { return sha256_hex(canonical_serialization(network)); }

std::vector<TowerLineUnit> discretize_corridor(const Corridor& corridor, double spacing_m) {
    if (!(spacing_m > 0.0)) throw Error(ErrorKind::InvalidArgument, "tower spacing must be > 0");
    const double length = polyline_length_km(corridor.polyline);
    if (!(length > 0.0)) throw Error(ErrorKind::ZeroLengthCorridor, "corridor " + std::to_string(corridor.id));
    const double spacing = spacing_m / 1000.0;
    // Lengths that are an exact multiple of the spacing must not gain a
    // sliver unit from rounding in the haversine sum.
    const auto count = static_cast<int>(std::max(1.0, std::ceil(length / spacing - 1e-9)));
    std::vector<TowerLineUnit> units;
    units.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double start = i * spacing;
        TowerLineUnit u;
        u.corridor_id = corridor.id;
        u.index = i;
        u.span_km = (i + 1 == count) ? length - start : spacing;
        u.tower = point_along(corridor.polyline, start);
        u.span_bearing_deg = bearing_along(corridor.polyline, start + 0.5 * u.span_km);
        units.push_back(u);
    }
    return units;
}

const CellAttributes* TerrainGrid::find(CellRef ref) const {
    auto it = cells.find({ref.y, ref.x});
    return it == cells.end() ? nullptr : &it->second;
}

namespace {

std::vector<int> candidates(double coordinate) {
    const double nearest = std::round(coordinate);
    if (std::abs(coordinate - nearest) <= 1e-9) {
        const int k = static_cast<int>(nearest);
        return {k - 1, k};
    }
    return {static_cast<int>(std::floor(coordinate))};
}

}  // namespace

CellLookup cell_lookup(const TerrainGrid& grid, LatLon point) {
    const auto p = LocalFrame(grid.origin).to_plane(point);
    for (int y : candidates(p.north / grid.cell_km)) {
        for (int x : candidates(p.east / grid.cell_km)) {
            if (const auto* attrs = grid.find({x, y})) return {*attrs, CellRef{x, y}};
        }
    }
    return {grid.default_cell, std::nullopt};
}

TerrainGrid parse_terrain(std::string_view text, LatLon origin, double cell_km, CellAttributes default_cell) {
    if (!(cell_km > 0.0)) throw Error(ErrorKind::InvalidArgument, "terrain cell size must be > 0");
    TerrainGrid grid;
    grid.origin = origin;
    grid.cell_km = cell_km;
    grid.default_cell = default_cell;
    const auto t = parse_table(text, "terrain");
    const auto cx = t.column("cell_x");
    const auto cy = t.column("cell_y");
    const auto alt = t.column("altitude_m");
    const auto slope = t.column("slope_deg");
    const auto rain = t.column("rain24h_mm");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const auto at = where(t, r);
        const int x = parse_int(row[cx], at);
        const int y = parse_int(row[cy], at);
        CellAttributes a{parse_number(row[alt], at), parse_number(row[slope], at), parse_number(row[rain], at)};
        if (!grid.cells.emplace(std::make_pair(y, x), a).second)
            throw Error(ErrorKind::DuplicateId, at + ": cell (" + std::to_string(x) + "," + std::to_string(y) + ")");
    }
    return grid;
}

TerrainGrid load_terrain(const std::filesystem::path& path, LatLon origin, double cell_km,
                         CellAttributes default_cell) {
    return parse_terrain(read_file(path), origin, cell_km, default_cell);
}

}  // namespace stormgrid
