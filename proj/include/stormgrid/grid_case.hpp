#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stormgrid/geo.hpp"

namespace stormgrid {

struct Bus {
    int id = 0;
    double load_mw = 0.0;
};

struct Generator {
    int bus = 0;
    double pmax_mw = 0.0;
    double pmin_mw = 0.0;
};

/// Electrical branch plus its geographic route and hazard-model parameters.
struct Corridor {
    int id = 0;
    int from_bus = 0;
    int to_bus = 0;
    double reactance_pu = 0.0;
    double limit_mw = 0.0;
    double vd_line_ms = 0.0;   // line design wind speed
    double vd_tower_ms = 0.0;  // tower design wind speed
    double gamma = 0.0;        // tower model coefficient, 1/(m/s)
    double op_years = 0.0;
    std::vector<LatLon> polyline;
    double length_km = 0.0;    // geodesic length of `polyline`
};

struct NetworkCase {
    std::vector<Bus> buses;
    std::vector<Generator> generators;
    std::vector<Corridor> corridors;
    double base_mva = 100.0;

    std::size_t bus_index(int id) const;
    std::size_t corridor_index(int id) const;
    std::optional<std::size_t> find_corridor(int id) const;
    double total_load_mw() const;
    double total_pmax_mw() const;
    /// Bounding box of every corridor vertex.
    GeoBox extent() const;
};

/// Default tower coefficient: ln(20)/vd_tower.
double default_tower_gamma(double vd_tower_ms);

/// Fill derived fields (length, default gamma) and check referential and
/// physical consistency. Throws MissingBus, DuplicateId,
/// NonPositiveReactance, NonPositiveLimit, InsufficientGeneration or
/// DisconnectedBaseGraph naming the offending record.
void finalize_case(NetworkCase& network);

struct CaseText {
    std::string buses;
    std::string generators;
    std::string corridors;
    std::string geography;  // optional: (id, polyline) overriding corridor routes
};

NetworkCase parse_case(const CaseText& text);

struct CaseFiles {
    std::filesystem::path buses;
    std::filesystem::path generators;
    std::filesystem::path corridors;
    std::optional<std::filesystem::path> geography;
};

NetworkCase load_case(const CaseFiles& files);

/// Polyline field: semicolon-separated "lat,lon" pairs.
std::vector<LatLon> parse_polyline(std::string_view text, std::string_view context);

/// Stable text rendering of every field; used for digests.
std::string canonical_serialization(const NetworkCase& network);
std::string case_digest(const NetworkCase& network);

// --- tower-line units -------------------------------------------------------

struct CellRef {
    int x = 0;
    int y = 0;
    friend bool operator==(const CellRef&, const CellRef&) = default;
};

/// One tower plus the span that follows it along the corridor.
struct TowerLineUnit {
    int corridor_id = 0;
    int index = 0;
    LatLon tower;
    double span_km = 0.0;
    double span_bearing_deg = 0.0;
    std::optional<CellRef> cell;
};

/// ceil(length/spacing) units placed by an arc-length walk; the final span
/// carries the remainder. Throws ZeroLengthCorridor.
std::vector<TowerLineUnit> discretize_corridor(const Corridor& corridor, double spacing_m);

// --- terrain ----------------------------------------------------------------

struct CellAttributes {
    double altitude_m = 0.0;
    double slope_deg = 0.0;
    double rain24h_mm = 0.0;
};

/// Square cells keyed by integer coordinates in the local plane of `origin`:
/// cell (x, y) spans [x*size, (x+1)*size) km east and [y*size, (y+1)*size) km north.
struct TerrainGrid {
    LatLon origin;
    double cell_km = 1.0;
    CellAttributes default_cell;
    std::map<std::pair<int, int>, CellAttributes> cells;  // key (y, x): row-major order

    const CellAttributes* find(CellRef ref) const;
};

struct CellLookup {
    CellAttributes attributes;
    std::optional<CellRef> cell;  // empty when the default cell was used

    bool fallback() const { return !cell.has_value(); }
};

/// Attributes of the cell containing `point`. A point on a shared edge goes
/// to the existing cell with the lowest row-major index; a point outside
/// coverage gets the grid's default cell.
CellLookup cell_lookup(const TerrainGrid& grid, LatLon point);

TerrainGrid parse_terrain(std::string_view text, LatLon origin, double cell_km, CellAttributes default_cell);
TerrainGrid load_terrain(const std::filesystem::path& path, LatLon origin, double cell_km,
                         CellAttributes default_cell = {});

}  // namespace stormgrid
