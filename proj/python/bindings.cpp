#include <algorithm>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "stormgrid/ahp_decision.hpp"
#include "stormgrid/error.hpp"
#include "stormgrid/feature_engine.hpp"
#include "stormgrid/load_shed.hpp"
#include "stormgrid/pipeline.hpp"
#include "stormgrid/resilience_iise.hpp"
#include "stormgrid/typhoon_field.hpp"

namespace py = pybind11;
using namespace stormgrid;

namespace {

NetworkCase load_case_dir(const std::filesystem::path& dir) {
    return load_case({dir / "buses.csv", dir / "generators.csv", dir / "corridors.csv", std::nullopt});
}

std::vector<std::size_t> corridor_indices(const NetworkCase& net, const std::vector<int>& ids) {
    std::vector<std::size_t> out;
    for (int id : ids) out.push_back(net.corridor_index(id));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Typhoon resilience assessment for transmission grids.";
    m.attr("__version__") = STORMGRID_VERSION;

    py::register_exception<Error>(m, "StormgridError", PyExc_ValueError);

    // wind field
    m.def("max_wind_radius_km", &max_wind_radius_km, py::arg("pressure_hpa"), py::arg("lat_deg"));
    m.def("peak_wind_speed", &peak_wind_speed, py::arg("batts_k"), py::arg("pressure_hpa"), py::arg("translation_kmh"));
    m.def("radial_wind_speed", &radial_wind_speed, py::arg("vmax_ms"), py::arg("rmax_km"), py::arg("distance_km"));
    m.def("rain_10min", &rain_10min, py::arg("r24h_mm"));
    m.def(
        "scenario_probabilities",
        [](const std::filesystem::path& marginals, const std::filesystem::path& typhoon) {
            const auto set = enumerate_scenarios(load_marginals(marginals), load_typhoon(typhoon));
            std::vector<std::pair<std::string, double>> out;
            for (const auto& s : set.scenarios) out.emplace_back(s.label, s.probability);
            return out;
        },
        py::arg("marginals"), py::arg("typhoon"));

    // correction coefficients
    py::class_<CorrectionModel>(m, "CorrectionModel")
        .def(py::init([](std::vector<double> weights, bool op_time_positive) {
                 return CorrectionModel(std::move(weights), default_feature_ranges(op_time_positive));
             }),
             py::arg("weights"), py::arg("op_time_positive") = false)
        .def("score", [](const CorrectionModel& c, const FeatureVector& x) { return c.score(x); })
        .def("k", [](const CorrectionModel& c, const FeatureVector& x) { return c.coefficient(x).k; })
        .def_property_readonly("weights", &CorrectionModel::weights);
    m.def("feature_names", [] {
        std::vector<std::string> out;
        for (auto n : feature_names()) out.emplace_back(n);
        return out;
    });

    // AHP
    m.def(
        "ahp_priority",
        [](std::vector<std::string> names, std::vector<std::vector<double>> rows, bool column_normalization) {
            PairwiseMatrix a{std::move(names), {}};
            for (const auto& r : rows) a.entries.insert(a.entries.end(), r.begin(), r.end());
            if (a.entries.size() != a.size() * a.size())
                throw Error(ErrorKind::DimensionMismatch, "pairwise matrix must be square");
            const auto r = ahp_priority(a, column_normalization ? PriorityMethod::ColumnNormalization
                                                                : PriorityMethod::GeometricMean);
            return py::make_tuple(r.priority, r.lambda_max, r.consistency_ratio);
        },
        py::arg("features"), py::arg("matrix"), py::arg("column_normalization") = false,
        "Returns (priority, lambda_max, consistency_ratio).");

    // grid and load shedding
    py::class_<NetworkCase>(m, "NetworkCase")
        .def_static("load", &load_case_dir, py::arg("directory"))
        .def_property_readonly("bus_count", [](const NetworkCase& n) { return n.buses.size(); })
        .def_property_readonly("corridor_ids", [](const NetworkCase& n) {
            std::vector<int> ids;
            for (const auto& c : n.corridors) ids.push_back(c.id);
            return ids;
        })
        .def_property_readonly("total_load_mw", &NetworkCase::total_load_mw);
    m.def(
        "min_load_shed",
        [](const NetworkCase& net, const std::vector<int>& failed_ids) {
            const auto s = min_load_shed(net, corridor_indices(net, failed_ids));
            py::dict d;
            d["total_shed_mw"] = s.total_shed_mw;
            d["bus_shed_mw"] = s.bus_shed_mw;
            d["corridor_flow_mw"] = s.corridor_flow_mw;
            d["status"] = to_string(s.status);
            return d;
        },
        py::arg("case"), py::arg("failed") = std::vector<int>{});

    // IISE
    py::enum_<HardeningMode>(m, "HardeningMode")
        .value("Eliminate", HardeningMode::Eliminate)
        .value("Redundancy", HardeningMode::Redundancy);
    py::class_<StateEnumeration>(m, "StateEnumeration")
        .def(py::init([](const NetworkCase& net, int order, unsigned threads) {
                 StateEnumeration e(net.corridors.size(), order);
                 py::gil_scoped_release release;
                 e.evaluate(load_shed_impact(net), threads);
                 return e;
             }),
             py::arg("case"), py::arg("order") = 2, py::arg("threads") = 1, py::keep_alive<1, 2>())
        .def_property_readonly("states", [](const StateEnumeration& e) { return e.states().size(); })
        .def("r_sys",
             [](const StateEnumeration& e, const ProbabilityTable& p, const std::vector<double>& w) {
                 return r_sys(e, p, w).value;
             },
             py::arg("probabilities"), py::arg("scenario_weights"))
        .def("r_corridor",
             [](const StateEnumeration& e, std::size_t index, const ProbabilityTable& p, const std::vector<double>& w,
                HardeningMode mode) { return r_corridor(index, e, p, w, mode); },
             py::arg("index"), py::arg("probabilities"), py::arg("scenario_weights"),
             py::arg("mode") = HardeningMode::Eliminate);

    // pipeline
    py::enum_<RunMode>(m, "RunMode").value("ModelDriven", RunMode::ModelDriven).value("Hybrid", RunMode::Hybrid);
    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("buses", &RunConfig::buses)
        .def_readwrite("generators", &RunConfig::generators)
        .def_readwrite("corridors", &RunConfig::corridors)
        .def_readwrite("geography", &RunConfig::geography)
        .def_readwrite("terrain", &RunConfig::terrain)
        .def_property(
            "terrain_origin", [](const RunConfig& c) { return std::make_pair(c.terrain_origin.lat, c.terrain_origin.lon); },
            [](RunConfig& c, std::pair<double, double> v) { c.terrain_origin = {v.first, v.second}; })
        .def_readwrite("terrain_cell_km", &RunConfig::terrain_cell_km)
        .def_readwrite("typhoon", &RunConfig::typhoon)
        .def_readwrite("marginals", &RunConfig::marginals)
        .def_readwrite("max_hours", &RunConfig::max_hours)
        .def_readwrite("schemes", &RunConfig::schemes)
        .def_readwrite("dataset", &RunConfig::dataset)
        .def_readwrite("synthetic_seed", &RunConfig::synthetic_seed)
        .def_readwrite("pairwise", &RunConfig::pairwise)
        .def_readwrite("trees", &RunConfig::trees)
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("mode", &RunConfig::mode)
        .def_readwrite("force_unit_k", &RunConfig::force_unit_k)
        .def_readwrite("spacing_m", &RunConfig::spacing_m)
        .def_readwrite("order", &RunConfig::order)
        .def_readwrite("r_set", &RunConfig::r_set)
        .def_readwrite("strategies", &RunConfig::strategies)
        .def_readwrite("cost_per_km", &RunConfig::cost_per_km)
        .def_readwrite("threads", &RunConfig::threads)
        .def("canonical_text", &RunConfig::canonical_text);
    m.def(
        "run",
        [](const std::string& subcommand, const RunConfig& config, bool strict) {
            RunResult r;
            {
                py::gil_scoped_release release;
                r = run_pipeline(subcommand, config, strict);
            }
            return py::make_tuple(r.artifacts, r.exit_code, r.summary);
        },
        py::arg("subcommand"), py::arg("config"), py::arg("strict") = false,
        "Returns (artifacts, exit_code, summary).");
}
