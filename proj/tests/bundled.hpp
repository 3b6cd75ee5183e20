// The bundled RTS-79 run, configured the same way data/rts79/run.ini does.
#pragma once

#include <string>

#include "stormgrid/pipeline.hpp"

inline stormgrid::RunConfig bundled_config() {
    const std::string dir = std::string(STORMGRID_DATA_DIR) + "/rts79/";
    stormgrid::RunConfig c;
    c.buses = dir + "buses.csv";
    c.generators = dir + "generators.csv";
    c.corridors = dir + "corridors.csv";
    c.terrain = dir + "terrain.csv";
    c.terrain_origin = {21.85, 111.40};
    c.terrain_cell_km = 2;
    c.typhoon = dir + "typhoon.ini";
    c.marginals = dir + "scenarios.ini";
    c.pairwise = std::string(STORMGRID_DATA_DIR) + "/reference/pairwise.csv";
    c.strategies = dir + "strategies.csv";
    c.mode = stormgrid::RunMode::Hybrid;
    c.order = 2;
    c.r_set = 3.0;
    c.synthetic_seed = 7;
    c.seed = 11;
    c.trees = 100;
    return c;
}
