// stormgrid: typhoon resilience assessment for geo-referenced transmission networks.
//
//   stormgrid --config run.ini assess --strict
//
// Settings come from the config file (`key = value`, keys are the long
// option names) and are overridden by flags. Relative paths in the config
// file resolve against its directory; relative paths given as flags
// resolve against the working directory.

#include <filesystem>
#include <iostream>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "stormgrid/error.hpp"
#include "stormgrid/pipeline.hpp"
#include "stormgrid/text_io.hpp"

namespace fs = std::filesystem;
using namespace stormgrid;

namespace {

struct PathOption {
    std::string name;
    std::string value;
};

std::set<std::string> flags_on_command_line(int argc, char** argv) {
    std::set<std::string> out;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a.rfind("--", 0) != 0) continue;
        out.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Typhoon resilience assessment and hardening-strategy ranking", "stormgrid"};
    app.set_config("--config", "", "Run configuration file (key = value)");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.fallthrough();
    app.require_subcommand(1);
    app.set_version_flag("--version", STORMGRID_VERSION);

    std::map<std::string, std::string> paths;
    for (const char* name : {"buses", "generators", "corridors", "geography", "terrain", "typhoon", "marginals",
                             "schemes", "dataset", "pairwise", "strategies"})
        paths[name];
    for (auto& [name, value] : paths) app.add_option("--" + name, value)->group("Inputs");

    RunConfig cfg;
    double dt_min = 0.0;
    std::string mode = "model-driven";
    std::string hardening = "eliminate";
    std::string priority = "geometric";
    std::string planted;
    std::string out_dir = "out";

    app.add_option("--terrain_origin_lat", cfg.terrain_origin.lat)->group("Terrain");
    app.add_option("--terrain_origin_lon", cfg.terrain_origin.lon)->group("Terrain");
    app.add_option("--terrain_cell_km", cfg.terrain_cell_km)->group("Terrain");
    app.add_option("--default_altitude_m", cfg.default_cell.altitude_m, "Altitude outside the raster")->group("Terrain");
    app.add_option("--default_slope_deg", cfg.default_cell.slope_deg)->group("Terrain");
    app.add_option("--default_rain24h_mm", cfg.default_cell.rain24h_mm)->group("Terrain");

    auto* dt_opt = app.add_option("--dt_min", dt_min, "Time step, overrides the typhoon file")->group("Storm");
    app.add_option("--max_hours", cfg.max_hours)->group("Storm");

    app.add_option("--synthetic_seed", cfg.synthetic_seed)->group("Weights");
    app.add_option("--synthetic_size", cfg.synthetic_size)->group("Weights");
    app.add_option("--planted_weights", planted, "Seven weights for the synthetic corpus")->group("Weights");
    app.add_option("--priority_method", priority, "geometric | column")->group("Weights");
    app.add_flag("--op_time_positive", cfg.op_time_positive, "Treat older lines as more fragile")->group("Weights");
    app.add_option("--trees", cfg.trees)->group("Weights");
    app.add_option("--seed", cfg.seed, "Forest and OOB seed")->group("Weights");

    app.add_option("--mode", mode, "model-driven | hybrid")->group("Assessment");
    app.add_flag("--force_unit_k", cfg.force_unit_k, "Hybrid run with every k pinned to 1")->group("Assessment");
    app.add_option("--spacing_m", cfg.spacing_m, "Tower spacing")->group("Assessment");
    app.add_option("--order,-J", cfg.order, "Enumeration order")->group("Assessment");
    app.add_option("--r_set", cfg.r_set, "Resilience target, MW")->group("Assessment");
    app.add_option("--hardening", hardening, "eliminate | redundancy")->group("Assessment");
    app.add_option("--base_mva", cfg.base_mva)->group("Assessment");
    app.add_option("--pmin_scale", cfg.pmin_scale, "Multiplier on generator minimums")->group("Assessment");
    app.add_option("--cost_per_km", cfg.cost_per_km, "Hardening cost, $/km")->group("Assessment");
    app.add_option("--threads", cfg.threads, "Worker threads for load-shedding solves");
    app.add_option("--out,-o", out_dir, "Output directory");

    bool strict = false;
    app.add_subcommand("simulate-wind", "Storm tracks and per-corridor wind series");
    app.add_subcommand("failure-rates", "Per-corridor failure curves, model-driven and hybrid");
    app.add_subcommand("weights", "Three weight schemes and the AHP selection");
    auto* assess = app.add_subcommand("assess", "R_sys and per-corridor R_m");
    assess->add_flag("--strict", strict, "Exit 4 when R_sys exceeds R_set");
    app.add_subcommand("strategies", "Rank hardening strategies");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        const auto on_line = flags_on_command_line(argc, argv);
        const auto config_file = app.get_config_ptr()->as<std::string>();
        const fs::path config_dir = config_file.empty() ? fs::current_path() : fs::absolute(config_file).parent_path();
        auto resolve = [&](const std::string& name) -> std::optional<fs::path> {
            const auto& v = paths.at(name);
            if (v.empty()) return std::nullopt;
            fs::path p(v);
            if (p.is_relative()) p = (on_line.count(name) ? fs::current_path() : config_dir) / p;
            return p.lexically_normal();
        };
        cfg.buses = resolve("buses").value_or(fs::path{});
        cfg.generators = resolve("generators").value_or(fs::path{});
        cfg.corridors = resolve("corridors").value_or(fs::path{});
        cfg.typhoon = resolve("typhoon").value_or(fs::path{});
        cfg.geography = resolve("geography");
        cfg.terrain = resolve("terrain");
        cfg.marginals = resolve("marginals");
        cfg.schemes = resolve("schemes");
        cfg.dataset = resolve("dataset");
        cfg.pairwise = resolve("pairwise");
        cfg.strategies = resolve("strategies");
        if (dt_opt->count() > 0) cfg.dt_min = dt_min;
        cfg.mode = run_mode_from_string(mode);
        if (hardening == "eliminate") {
            cfg.hardening = HardeningMode::Eliminate;
        } else if (hardening == "redundancy") {
            cfg.hardening = HardeningMode::Redundancy;
        } else {
            throw Error(ErrorKind::InvalidArgument, "hardening must be 'eliminate' or 'redundancy'");
        }
        if (priority == "geometric") {
            cfg.priority_method = PriorityMethod::GeometricMean;
        } else if (priority == "column") {
            cfg.priority_method = PriorityMethod::ColumnNormalization;
        } else {
            throw Error(ErrorKind::InvalidArgument, "priority_method must be 'geometric' or 'column'");
        }
        if (!planted.empty()) {
            cfg.planted_weights.clear();
            std::string text = planted;
            std::replace(text.begin(), text.end(), ',', ' ');
            for (const auto& tok : split(text, ' '))
                if (!trim(tok).empty()) cfg.planted_weights.push_back(parse_number(trim(tok), "planted_weights"));
        }

        const auto result = run_pipeline(command, cfg, strict);
        write_artifacts(out_dir, result.artifacts);
        std::cout << command << ": " << result.summary << '\n';
        for (const auto& [name, body] : result.artifacts) std::cout << "  wrote " << (fs::path(out_dir) / name).string() << '\n';
        return result.exit_code;
    } catch (const Error& e) {
        std::cerr << "stormgrid " << command << " failed: " << e.what() << '\n';
        return e.numeric() ? kExitNumeric : kExitValidation;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "stormgrid " << command << " failed: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "stormgrid " << command << " failed: " << e.what() << '\n';
        return kExitNumeric;
    }
}
