#include "stormgrid/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "stormgrid/error.hpp"
#include "stormgrid/text_io.hpp"

namespace stormgrid {

const char* to_string(RunMode mode) { return mode == RunMode::Hybrid ? "hybrid" : "model-driven"; }

RunMode run_mode_from_string(const std::string& text) {
    if (text == "hybrid") return RunMode::Hybrid;
    if (text == "model-driven" || text == "model") return RunMode::ModelDriven;
    throw Error(ErrorKind::InvalidArgument, "mode must be 'model-driven' or 'hybrid', got '" + text + "'");
}

namespace {

namespace fs = std::filesystem;

void require_file(const fs::path& p, const char* what) {
    if (p.empty()) throw Error(ErrorKind::InvalidArgument, std::string(what) + " path is required");
    if (!fs::is_regular_file(p)) throw Error(ErrorKind::InvalidArgument, std::string(what) + " not found: " + p.string());
}

void require_file(const std::optional<fs::path>& p, const char* what) {
    if (p) require_file(*p, what);
}

void resolve(fs::path& p, const fs::path& base) {
    if (!p.empty() && p.is_relative()) p = base / p;
}

void resolve(std::optional<fs::path>& p, const fs::path& base) {
    if (p) resolve(*p, base);
}

std::string file_digest(const fs::path& p) { return sha256_hex(read_file(p)); }

// Prefix the failing stage onto any library error.
template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.kind(), std::string("stage '") + name + "': " + e.what());
    }
}

}  // namespace

void RunConfig::validate() const {
    require_file(buses, "buses file");
    require_file(generators, "generators file");
    require_file(corridors, "corridors file");
    require_file(geography, "geography file");
    require_file(terrain, "terrain file");
    require_file(typhoon, "typhoon file");
    require_file(marginals, "marginals file");
    require_file(schemes, "weight schemes file");
    require_file(dataset, "dataset file");
    require_file(pairwise, "pairwise matrix file");
    require_file(strategies, "strategies file");
    if (order < 1) throw Error(ErrorKind::InvalidArgument, "order J must be >= 1");
    if (!(spacing_m > 0.0)) throw Error(ErrorKind::InvalidArgument, "tower spacing must be > 0");
    if (!(terrain_cell_km > 0.0)) throw Error(ErrorKind::InvalidArgument, "terrain cell size must be > 0");
    if (dt_min && !(*dt_min > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be > 0");
    if (!(max_hours > 0.0)) throw Error(ErrorKind::InvalidArgument, "max_hours must be > 0");
    if (!(r_set >= 0.0)) throw Error(ErrorKind::InvalidArgument, "R_set must be >= 0");
    if (!(cost_per_km >= 0.0)) throw Error(ErrorKind::InvalidArgument, "cost rate must be >= 0");
    if (!(base_mva > 0.0)) throw Error(ErrorKind::InvalidArgument, "base MVA must be > 0");
    if (!(pmin_scale >= 0.0)) throw Error(ErrorKind::InvalidArgument, "pmin scale must be >= 0");
    if (trees < 1) throw Error(ErrorKind::InvalidArgument, "forest needs at least one tree");
    if (synthetic_size < 2) throw Error(ErrorKind::InvalidArgument, "synthetic dataset needs at least two rows");
    if (planted_weights.size() != kFeatureCount)
        throw Error(ErrorKind::DimensionMismatch, "planted weights need one entry per feature");
    if (mode == RunMode::Hybrid && !schemes && !pairwise)
        throw Error(ErrorKind::InvalidArgument, "hybrid mode needs a pairwise matrix (or precomputed schemes)");
}

void RunConfig::resolve_paths(const fs::path& base) {
    resolve(buses, base);
    resolve(generators, base);
    resolve(corridors, base);
    resolve(geography, base);
    resolve(terrain, base);
    resolve(typhoon, base);
    resolve(marginals, base);
    resolve(schemes, base);
    resolve(dataset, base);
    resolve(pairwise, base);
    resolve(strategies, base);
}

std::string RunConfig::canonical_text() const {
    std::ostringstream out;
    auto num = [&](const char* key, double v) { out << key << " = " << format_number(v) << '\n'; };
    auto file = [&](const char* key, const std::optional<fs::path>& p) {
        out << key << " = " << (p ? file_digest(*p) : std::string("none")) << '\n';
    };
    file("buses", buses);
    file("generators", generators);
    file("corridors", corridors);
    file("geography", geography);
    file("terrain", terrain);
    num("terrain_origin_lat", terrain_origin.lat);
    num("terrain_origin_lon", terrain_origin.lon);
    num("terrain_cell_km", terrain_cell_km);
    num("default_altitude_m", default_cell.altitude_m);
    num("default_slope_deg", default_cell.slope_deg);
    num("default_rain24h_mm", default_cell.rain24h_mm);
    file("typhoon", typhoon);
    file("marginals", marginals);
    out << "dt_min = " << (dt_min ? format_number(*dt_min) : std::string("file")) << '\n';
    num("max_hours", max_hours);
    file("schemes", schemes);
    file("dataset", dataset);
    out << "synthetic_seed = " << synthetic_seed << '\n';
    out << "synthetic_size = " << synthetic_size << '\n';
    out << "planted_weights =";
    for (double w : planted_weights) out << ' ' << format_number(w);
    out << '\n';
    file("pairwise", pairwise);
    out << "priority_method = " << (priority_method == PriorityMethod::GeometricMean ? "geometric" : "column") << '\n';
    out << "op_time_positive = " << op_time_positive << '\n';
    out << "trees = " << trees << '\n';
    out << "seed = " << seed << '\n';
    out << "mode = " << to_string(mode) << '\n';
    out << "force_unit_k = " << force_unit_k << '\n';
    num("spacing_m", spacing_m);
    out << "order = " << order << '\n';
    num("r_set", r_set);
    out << "hardening = " << (hardening == HardeningMode::Eliminate ? "eliminate" : "redundancy") << '\n';
    num("base_mva", base_mva);
    num("pmin_scale", pmin_scale);
    file("strategies", strategies);
    num("cost_per_km", cost_per_km);
    return out.str();
}

Inputs load_inputs(const RunConfig& config) {
    Inputs in;
    in.network = stage("load-case", [&] {
        CaseFiles files{config.buses, config.generators, config.corridors, config.geography};
        auto net = load_case(files);
        net.base_mva = config.base_mva;
        for (auto& g : net.generators) g.pmin_mw *= config.pmin_scale;
        return net;
    });
    if (config.terrain) {
        in.terrain = stage("load-terrain", [&] {
            return load_terrain(*config.terrain, config.terrain_origin, config.terrain_cell_km, config.default_cell);
        });
    }
    in.scenarios = stage("scenarios", [&] {
        auto base = load_typhoon(config.typhoon);
        if (config.dt_min) base.dt_min = *config.dt_min;
        base.validate();
        return config.marginals ? enumerate_scenarios(load_marginals(*config.marginals), base) : single_scenario(base);
    });
    TerrainGrid fallback;
    fallback.default_cell = config.default_cell;
    fallback.cell_km = config.terrain_cell_km;
    const TerrainGrid* grid = in.terrain ? &*in.terrain : &fallback;
    in.units = stage("discretize", [&] { return DiscretizedCase::build(in.network, config.spacing_m, grid); });
    return in;
}

WeightsOutcome compute_weights(const RunConfig& config) {
    return stage("weights", [&] {
        WeightsOutcome out;
        const auto ranges = default_feature_ranges(config.op_time_positive);
        if (config.schemes) {
            out.schemes = load_weight_schemes(*config.schemes);
            out.source = "schemes file " + config.schemes->filename().string();
        } else {
            Dataset data;
            if (config.dataset) {
                data = load_dataset(*config.dataset);
            } else {
                data = synthesize_dataset(config.synthetic_seed, config.synthetic_size, config.planted_weights, ranges);
            }
            out.source = data.provenance;
            ForestConfig fc;
            fc.trees = static_cast<int>(config.trees);
            fc.seed = config.seed;
            const auto forest = train_forest(data, fc);
            auto gini = gini_importance(forest);
            gini.name = "Scheme1";
            OobOptions oob;
            oob.seed = config.seed;
            auto perm = oob_importance(forest, data, oob);
            perm.name = "Scheme2";
            auto entropy = entropy_weights(data, ranges);
            entropy.name = "Scheme3";
            out.schemes = {gini, perm, entropy};
        }
        if (out.schemes.empty()) throw Error(ErrorKind::InvalidArgument, "no weight schemes");
        if (config.pairwise) {
            const auto names = canonical_feature_order();
            const auto matrix = load_pairwise(*config.pairwise).aligned(names);
            out.ahp = ahp_priority(matrix, config.priority_method);
            const auto y = build_decision_matrix(out.schemes, names);
            out.scores = waa_scores(y, out.ahp->priority);
            out.selection = select_scheme(out.scores);
        } else if (out.schemes.size() != 1) {
            throw Error(ErrorKind::InvalidArgument, "choosing among several schemes needs a pairwise matrix");
        }
        return out;
    });
}

CorrectionModel correction_model(const RunConfig& config, const WeightScheme& scheme) {
    std::vector<double> w;
    for (const auto& name : canonical_feature_order()) w.push_back(scheme.weight_of(name));
    return CorrectionModel(std::move(w), default_feature_ranges(config.op_time_positive));
}

FailureOutcome compute_failures(const RunConfig& config, const Inputs& inputs, const CorrectionModel* corrections,
                                bool record_series, bool keep_units) {
    return stage("failure-rates", [&] {
        FailureOutcome out;
        ProfileOptions opts;
        opts.max_hours = config.max_hours;
        opts.record_series = record_series;
        opts.keep_units = keep_units;
        opts.force_unit_coefficients = config.force_unit_k;
        for (const auto& sc : inputs.scenarios.scenarios) {
            auto profile = scenario_failure_profile(inputs.network, inputs.units, sc.params, corrections, opts);
            profile.scenario = sc.label;
            out.model.push_back(profile.corridor_probabilities(false));
            out.hybrid.push_back(profile.corridor_probabilities(true));
            out.scenario_weights.push_back(sc.probability);
            out.profiles.push_back(std::move(profile));
        }
        return out;
    });
}

namespace {

std::string ahp_text(const WeightsOutcome& w) {
    std::ostringstream out;
    out << "source\t" << w.source << '\n';
    if (w.ahp) {
        const auto names = canonical_feature_order();
        out << "lambda_max\t" << format_sig(w.ahp->lambda_max, 8) << '\n';
        out << "consistency_ratio\t" << format_sig(w.ahp->consistency_ratio, 6) << '\n';
        out << "consistent\t" << (w.ahp->acceptable() ? "yes" : "no (CR > 0.10)") << '\n';
        out << "\nfeature\tpriority\n";
        for (std::size_t i = 0; i < names.size(); ++i)
            out << names[i] << '\t' << format_sig(w.ahp->priority[i], 6) << '\n';
        out << "\nscheme\tscore\n";
        for (std::size_t i = 0; i < w.schemes.size(); ++i)
            out << w.schemes[i].name << '\t' << format_sig(w.scores[i], 6) << '\n';
    }
    out << "\nselected\t" << w.selected().name << (w.selection.tie ? "\t(tie)" : "") << '\n';
    return out.str();
}

std::string wind_series_text(const Inputs& in) {
    std::ostringstream out;
    out << "scenario\tt_h\tcorridor\tmidpoint_wind_ms\n";
    std::vector<LatLon> midpoints;
    for (const auto& c : in.network.corridors) midpoints.push_back(point_along(c.polyline, 0.5 * c.length_km));
    for (const auto& sc : in.scenarios.scenarios) {
        for (const auto& st : simulate_track(sc.params, in.units.region)) {
            for (std::size_t c = 0; c < midpoints.size(); ++c) {
                out << sc.label << '\t' << format_number(st.t_hours) << '\t' << in.network.corridors[c].id << '\t'
                    << format_sig(wind_at(st, midpoints[c]).speed_ms, 8) << '\n';
            }
        }
    }
    return out.str();
}

std::string track_text(const Inputs& in) {
    std::ostringstream out;
    out << "scenario\tprobability\tt_h\tlat\tlon\tpressure_hpa\tvmax_ms\trmax_km\n";
    for (const auto& sc : in.scenarios.scenarios) {
        for (const auto& st : simulate_track(sc.params, in.units.region)) {
            out << sc.label << '\t' << format_sig(sc.probability, 10) << '\t' << format_number(st.t_hours) << '\t'
                << format_sig(st.center.lat, 9) << '\t' << format_sig(st.center.lon, 9) << '\t'
                << format_sig(st.pressure_hpa, 8) << '\t' << format_sig(st.vmax_ms, 8) << '\t'
                << format_sig(st.rmax_km, 8) << '\n';
        }
    }
    return out.str();
}

std::string probabilities_text(const Inputs& in, const FailureOutcome& f) {
    std::ostringstream out;
    out << "scenario\tprobability\tcorridor\tp_model\tp_hybrid\n";
    for (std::size_t w = 0; w < f.profiles.size(); ++w) {
        for (std::size_t c = 0; c < in.network.corridors.size(); ++c) {
            out << f.profiles[w].scenario << '\t' << format_sig(f.scenario_weights[w], 10) << '\t'
                << in.network.corridors[c].id << '\t' << format_sig(f.model[w][c], 10) << '\t'
                << format_sig(f.hybrid[w][c], 10) << '\n';
        }
    }
    return out.str();
}

std::string curves_text(const FailureOutcome& f) {
    std::ostringstream out;
    out << "scenario\tt_h\tcorridor\tp_model\tp_hybrid\n";
    for (const auto& p : f.profiles) {
        for (const auto& c : p.corridors) {
            for (std::size_t i = 0; i < p.times_h.size(); ++i) {
                out << p.scenario << '\t' << format_number(p.times_h[i]) << '\t' << c.corridor_id << '\t'
                    << format_sig(c.model_series[i], 10) << '\t' << format_sig(c.comprehensive_series[i], 10) << '\n';
            }
        }
    }
    return out.str();
}

std::string unit_features_text(const FailureOutcome& f) {
    std::ostringstream out;
    out << "scenario\tcorridor\tunit";
    for (const auto& n : feature_names()) out << '\t' << n;
    out << "\tscore\tk\tclamped\tp_model\tp_corrected\n";
    for (const auto& p : f.profiles) {
        for (const auto& c : p.corridors) {
            for (const auto& u : c.units) {
                out << p.scenario << '\t' << c.corridor_id << '\t' << u.index;
                for (double x : u.features) out << '\t' << format_sig(x, 6);
                out << '\t' << format_sig(u.score, 6) << '\t' << format_sig(u.k, 6) << '\t' << (u.k_clamped ? 1 : 0)
                    << '\t' << format_sig(u.p_model, 8) << '\t' << format_sig(u.p_corrected, 8) << '\n';
            }
        }
    }
    return out.str();
}

std::string comparison_text(const ResilienceReport& model, const ResilienceReport& hybrid) {
    std::ostringstream out;
    out << "index\tmodel_driven_mw\thybrid_mw\n";
    out << "R_sys\t" << format_sig(model.r_sys, 10) << '\t' << format_sig(hybrid.r_sys, 10) << '\n';
    std::map<int, double> model_rm;
    for (const auto& c : model.corridors) model_rm[c.corridor_id] = c.value;
    for (const auto& c : hybrid.corridors)
        out << "R_" << c.corridor_id << '\t' << format_sig(model_rm[c.corridor_id], 10) << '\t'
            << format_sig(c.value, 10) << '\n';
    return out.str();
}

struct Assessment {
    Inputs inputs;
    FailureOutcome failures;
    std::optional<WeightsOutcome> weights;
    StateEnumeration table{1, 1};
    ResilienceReport report;
    std::optional<ResilienceReport> model_report;
};

const ProbabilityTable& active(const RunConfig& config, const FailureOutcome& f) {
    return config.mode == RunMode::Hybrid ? f.hybrid : f.model;
}

Assessment assess(const RunConfig& config) {
    Assessment a;
    a.inputs = load_inputs(config);
    std::optional<CorrectionModel> model;
    if (config.mode == RunMode::Hybrid) {
        a.weights = compute_weights(config);
        model.emplace(correction_model(config, a.weights->selected()));
    }
    a.failures = compute_failures(config, a.inputs, model ? &*model : nullptr, false);
    a.table = stage("enumerate", [&] {
        StateEnumeration table(a.inputs.network.corridors.size(), config.order);
        table.evaluate(load_shed_impact(a.inputs.network), config.threads);
        return table;
    });
    auto report_for = [&](const ProbabilityTable& p) {
        auto r = assess_resilience(a.inputs.network, a.table, p, a.failures.scenario_weights, config.hardening);
        for (const auto& sc : a.inputs.scenarios.scenarios) r.scenario_labels.push_back(sc.label);
        return r;
    };
    a.report = report_for(active(config, a.failures));
    if (config.mode == RunMode::Hybrid) a.model_report = report_for(a.failures.model);
    return a;
}

std::string target_line(const RunConfig& config, double r_sys) {
    if (r_sys <= config.r_set) return "meets target; no strengthening required";
    return "target not met; strengthening required";
}

}  // namespace

RunResult run_pipeline(const std::string& subcommand, const RunConfig& config, bool strict) {
    stage("config", [&] {
        config.validate();
        return 0;
    });
    RunResult out;
    if (subcommand == "simulate-wind") {
        const auto in = load_inputs(config);
        out.artifacts["track.tsv"] = stage("simulate-wind", [&] { return track_text(in); });
        out.artifacts["wind_series.tsv"] = stage("simulate-wind", [&] { return wind_series_text(in); });
        out.summary = std::to_string(in.scenarios.scenarios.size()) + " scenarios simulated";
    } else if (subcommand == "failure-rates") {
        const auto in = load_inputs(config);
        const auto weights = compute_weights(config);
        const auto model = correction_model(config, weights.selected());
        const auto f = compute_failures(config, in, &model, true, true);
        out.artifacts["corridor_probabilities.tsv"] = probabilities_text(in, f);
        out.artifacts["failure_curves.tsv"] = curves_text(f);
        out.artifacts["unit_features.tsv"] = unit_features_text(f);
        out.summary = std::to_string(f.profiles.size()) + " scenarios, " +
                      std::to_string(in.units.unit_count()) + " tower-line units, " +
                      std::to_string(in.units.fallback_cells) + " outside the terrain raster";
    } else if (subcommand == "weights") {
        const auto w = compute_weights(config);
        out.artifacts["weights.tsv"] = weight_schemes_to_text(w.schemes);
        out.artifacts["ahp.txt"] = ahp_text(w);
        out.summary = "selected " + w.selected().name;
    } else if (subcommand == "assess") {
        const auto a = assess(config);
        std::string text = resilience_report_text(a.inputs.network, a.report);
        text = "mode\t" + std::string(to_string(config.mode)) + "\nr_set_mw\t" + format_sig(config.r_set, 10) +
               "\nstatus\t" + target_line(config, a.report.r_sys) + "\n" + text;
        out.artifacts["resilience.txt"] = text;
        if (a.model_report) out.artifacts["comparison.tsv"] = comparison_text(*a.model_report, a.report);
        if (a.weights) out.artifacts["ahp.txt"] = ahp_text(*a.weights);
        out.summary = "R_sys = " + format_sig(a.report.r_sys, 6) + " MW; " + target_line(config, a.report.r_sys);
        if (strict && a.report.r_sys > config.r_set) out.exit_code = kExitTargetNotMet;
    } else if (subcommand == "strategies") {
        if (!config.strategies) throw Error(ErrorKind::InvalidArgument, "stage 'config': strategies file is required");
        const auto a = assess(config);
        const auto list = stage("strategies", [&] { return load_strategies(*config.strategies, config.cost_per_km); });
        std::vector<StrategyResult> results(list.size());
        stage("strategies", [&] {
            for (std::size_t i = 0; i < list.size(); ++i)
                results[i] = evaluate_strategy(a.inputs.network, list[i], a.table, active(config, a.failures),
                                               a.failures.scenario_weights, a.report.r_sys, config.r_set,
                                               config.hardening);
            return 0;
        });
        const auto ranked = rank_strategies(results);
        out.artifacts["strategies.tsv"] = "r_sys_mw\t" + format_sig(a.report.r_sys, 10) + "\nr_set_mw\t" +
                                          format_sig(config.r_set, 10) + "\n\n" + strategy_table_text(ranked);
        out.artifacts["strategies_normalized.tsv"] = normalized_metrics_text(ranked);
        out.summary = ranked.empty() ? "no strategies" : "best strategy " + ranked.front().name;
    } else {
        throw Error(ErrorKind::InvalidArgument, "unknown subcommand '" + subcommand + "'");
    }
    std::ostringstream manifest;
    manifest << "stormgrid " << STORMGRID_VERSION << '\n';
    manifest << "subcommand = " << subcommand << '\n';
    manifest << "config_sha256 = " << sha256_hex(config.canonical_text()) << '\n';
    manifest << "seed = " << config.seed << '\n';
    manifest << "synthetic_seed = " << config.synthetic_seed << '\n';
    for (const auto& [name, body] : out.artifacts) manifest << "artifact " << name << ' ' << sha256_hex(body) << '\n';
    manifest << "\n# resolved configuration\n" << config.canonical_text();
    out.artifacts["manifest.txt"] = manifest.str();
    return out;
}

void write_artifacts(const fs::path& dir, const std::map<std::string, std::string>& artifacts) {
    fs::create_directories(dir);
    std::vector<std::pair<fs::path, fs::path>> staged;
    try {
        for (const auto& [name, body] : artifacts) {
            const fs::path final_path = dir / name;
            fs::path tmp = final_path;
            tmp += ".partial";
            std::ofstream f(tmp, std::ios::binary);
            staged.emplace_back(tmp, final_path);
            f << body;
            f.close();
            if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + tmp.string());
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& s : staged) fs::remove(s.first, ec);
        throw;
    }
    for (const auto& [tmp, final_path] : staged) fs::rename(tmp, final_path);
}

}  // namespace stormgrid
