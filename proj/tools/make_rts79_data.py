#!/usr/bin/env python3
"""Write the bundled RTS-79 case, mapped onto the coast west of the
Mangkhut (2018) landfall, plus a synthetic terrain raster.

Electrical data follow the IEEE RTS-79 24-bus system (loads, aggregated unit
capacities, branch reactances and ratings). Geography, design wind speeds,
ages and terrain are invented for the bundled example and regenerate
deterministically from this script.
"""

import math
import pathlib
import random

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "rts79"

LOADS = {1: 108, 2: 97, 3: 180, 4: 74, 5: 71, 6: 136, 7: 125, 8: 171, 9: 175, 10: 195,
         11: 0, 12: 0, 13: 265, 14: 194, 15: 317, 16: 100, 17: 0, 18: 333, 19: 181,
         20: 128, 21: 0, 22: 0, 23: 0, 24: 0}

# unit groups per bus (pmax MW)
UNITS = {1: [20, 20, 76, 76], 2: [20, 20, 76, 76], 7: [100, 100, 100], 13: [197, 197, 197],
         15: [12, 12, 12, 12, 12, 155], 16: [155], 18: [400], 21: [400], 22: [50] * 6,
         23: [155, 155, 350]}

BRANCHES = [
    (1, 2, .0139, 175), (1, 3, .2112, 175), (1, 5, .0845, 175), (2, 4, .1267, 175), (2, 6, .192, 175),
    (3, 9, .119, 175), (3, 24, .0839, 400), (4, 9, .1037, 175), (5, 10, .0883, 175), (6, 10, .0605, 175),
    (7, 8, .0614, 175), (8, 9, .1651, 175), (8, 10, .1651, 175), (9, 11, .0839, 400), (9, 12, .0839, 400),
    (10, 11, .0839, 400), (10, 12, .0839, 400), (11, 13, .0476, 500), (11, 14, .0418, 500),
    (12, 13, .0476, 500), (12, 23, .0966, 500), (13, 23, .0865, 500), (14, 16, .0389, 500),
    (15, 16, .0173, 500), (15, 21, .049, 500), (15, 21, .049, 500), (15, 24, .0519, 500),
    (16, 17, .0259, 500), (16, 19, .0231, 500), (17, 18, .0144, 500), (17, 22, .1053, 500),
    (18, 21, .0259, 500), (18, 21, .0259, 500), (19, 20, .0396, 500), (19, 20, .0396, 500),
    (20, 23, .0216, 500), (20, 23, .0216, 500), (21, 22, .0678, 500),
]

# substation sites (lat, lon); the 138 kV area sits on the coast, 230 kV inland
SITES = {
    1: (22.00, 112.05), 2: (21.97, 112.30), 3: (22.18, 111.80), 4: (22.12, 112.40),
    5: (22.10, 112.10), 6: (22.05, 112.62), 7: (21.92, 112.72), 8: (22.08, 112.78),
    9: (22.25, 112.30), 10: (22.22, 112.58), 11: (22.40, 112.40), 12: (22.38, 112.65),
    13: (22.55, 112.75), 14: (22.52, 112.25), 15: (22.62, 111.70), 16: (22.60, 112.05),
    17: (22.78, 112.00), 18: (22.85, 111.80), 19: (22.70, 112.30), 20: (22.78, 112.50),
    21: (22.80, 111.55), 22: (22.95, 111.85), 23: (22.70, 112.72), 24: (22.40, 111.75),
}

TERRAIN_ORIGIN = (21.85, 111.40)
CELL_KM = 2.0
EARTH_KM = 6371.0088


def polyline(rng, a, b, offset):
    (la, oa), (lb, ob) = SITES[a], SITES[b]
    # one bent midpoint, pushed sideways; parallel circuits get separate offsets
    mid_lat = 0.5 * (la + lb)
    mid_lon = 0.5 * (oa + ob)
    dlat, dlon = lb - la, (ob - oa) * math.cos(math.radians(mid_lat))
    norm = math.hypot(dlat, dlon) or 1.0
    bend = rng.uniform(-0.02, 0.02) + offset
    mid_lat += -dlon / norm * bend
    mid_lon += dlat / norm * bend / math.cos(math.radians(mid_lat))
    pts = [(la, oa), (mid_lat, mid_lon), (lb, ob)]
    return ";".join(f"{p[0]:.5f},{p[1]:.5f}" for p in pts)


def terrain_value(x, y):
    # altitude rises inland with ridges; rainfall heavier near the landfall
    east = x * CELL_KM
    north = y * CELL_KM
    ridge = 40.0 * math.sin(east / 23.0) * math.cos(north / 17.0)
    altitude = max(-15.0, min(148.0, 1.05 * north - 5.0 + ridge))
    slope = max(0.0, min(45.0, 12.0 + 10.0 * math.sin(east / 9.0 + north / 13.0) + 0.08 * altitude))
    landfall_east = (112.7 - TERRAIN_ORIGIN[1]) * 111.32 * math.cos(math.radians(21.8))
    dist = math.hypot(east - landfall_east, north + 5.0)
    rain = max(0.2, min(3.6, 3.4 * math.exp(-dist / 90.0) + 0.3 * math.sin(east / 11.0) ** 2))
    return altitude, slope, rain


def main():
    rng = random.Random(1979)
    OUT.mkdir(parents=True, exist_ok=True)
    with open(OUT / "buses.csv", "w") as f:
        f.write("id,load_mw\n")
        for b in range(1, 25):
            f.write(f"{b},{LOADS[b]}\n")
    with open(OUT / "generators.csv", "w") as f:
        f.write("bus,pmax_mw,pmin_mw\n")
        for b, units in UNITS.items():
            for u in units:
                f.write(f"{b},{u},0\n")
    seen = {}
    with open(OUT / "corridors.csv", "w") as f:
        f.write("id,from,to,x_pu,limit_mw,vd_line,vd_tower,op_years,polyline\n")
        for i, (a, b, x, rate) in enumerate(BRANCHES, start=1):
            k = seen.get((a, b), 0)
            seen[(a, b)] = k + 1
            hv = rate >= 400
            vd_line = 47.0 + rng.uniform(-2.0, 2.0) + (2.0 if hv else 0.0)
            vd_tower = 55.0 + rng.uniform(-3.0, 3.0) + (3.0 if hv else 0.0)
            age = rng.randint(4, 36)
            line = polyline(rng, a, b, 0.012 * k)
            f.write(f'{i},{a},{b},{x},{rate},{vd_line:.1f},{vd_tower:.1f},{age},"{line}"\n')
    lat_km = EARTH_KM * math.pi / 180.0
    lon_km = lat_km * math.cos(math.radians(TERRAIN_ORIGIN[0]))
    nx = int(math.ceil((112.95 - TERRAIN_ORIGIN[1]) * lon_km / CELL_KM))
    ny = int(math.ceil((23.05 - TERRAIN_ORIGIN[0]) * lat_km / CELL_KM))
    with open(OUT / "terrain.csv", "w") as f:
        f.write("cell_x,cell_y,altitude_m,slope_deg,rain24h_mm\n")
        for y in range(ny):
            for x in range(nx):
                alt, slope, rain = terrain_value(x, y)
                f.write(f"{x},{y},{alt:.1f},{slope:.1f},{rain:.2f}\n")


if __name__ == "__main__":
    main()
