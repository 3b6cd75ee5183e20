#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stormgrid/ahp_decision.hpp"
#include "stormgrid/failure_model.hpp"
#include "stormgrid/grid_case.hpp"
#include "stormgrid/importance.hpp"
#include "stormgrid/resilience_iise.hpp"
#include "stormgrid/strategy_eval.hpp"
#include "stormgrid/typhoon_field.hpp"

namespace stormgrid {

enum class RunMode { ModelDriven, Hybrid };

const char* to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& text);

struct RunConfig {
    // network
    std::filesystem::path buses;
    std::filesystem::path generators;
    std::filesystem::path corridors;
    std::optional<std::filesystem::path> geography;
    // terrain raster; units outside it (or all units, without a raster) use the default cell
    std::optional<std::filesystem::path> terrain;
    LatLon terrain_origin{};
    double terrain_cell_km = 1.0;
    CellAttributes default_cell{};
    // storm
    std::filesystem::path typhoon;
    std::optional<std::filesystem::path> marginals;  // absent: the typhoon file is the only scenario
    std::optional<double> dt_min;                    // overrides the typhoon file
    double max_hours = 240.0;
    // correction weights: precomputed schemes, or derived from a dataset
    std::optional<std::filesystem::path> schemes;
    std::optional<std::filesystem::path> dataset;    // absent: synthetic corpus
    std::uint64_t synthetic_seed = 0;
    std::size_t synthetic_size = 640;
    std::vector<double> planted_weights{0.30, 0.20, 0.15, 0.10, 0.10, 0.10, 0.05};
    std::optional<std::filesystem::path> pairwise;
    PriorityMethod priority_method = PriorityMethod::GeometricMean;
    bool op_time_positive = false;
    std::size_t trees = 100;
    std::uint64_t seed = 0;
    // assessment
    RunMode mode = RunMode::ModelDriven;
    bool force_unit_k = false;
    double spacing_m = 500.0;
    int order = 2;
    double r_set = 17e-5;
    HardeningMode hardening = HardeningMode::Eliminate;
    double base_mva = 100.0;
    double pmin_scale = 1.0;  // multiplies every generator minimum
    // strategies
    std::optional<std::filesystem::path> strategies;
    double cost_per_km = kDefaultCostPerKm;
    unsigned threads = 1;

    /// Checks ranges and that every referenced path exists. Throws InvalidArgument.
    void validate() const;
    /// Rewrite relative paths against `base`.
    void resolve_paths(const std::filesystem::path& base);
    /// Stable `key = value` rendering of every setting that affects results
    /// (threads excluded), followed by the digest of each input file.
    std::string canonical_text() const;
};

struct Inputs {
    NetworkCase network;
    std::optional<TerrainGrid> terrain;
    ScenarioSet scenarios;
    DiscretizedCase units;
};

Inputs load_inputs(const RunConfig& config);

struct WeightsOutcome {
    std::vector<WeightScheme> schemes;
    std::optional<AhpResult> ahp;  // absent with a single scheme and no pairwise matrix
    std::vector<double> scores;
    Selection selection;
    std::string source;

    const WeightScheme& selected() const { return schemes[selection.index]; }
};

WeightsOutcome compute_weights(const RunConfig& config);

/// Selected weights in canonical feature order.
CorrectionModel correction_model(const RunConfig& config, const WeightScheme& scheme);

struct FailureOutcome {
    std::vector<FailureProfile> profiles;
    ProbabilityTable model;
    ProbabilityTable hybrid;  // equals `model` when no correction model was given
    std::vector<double> scenario_weights;
};

FailureOutcome compute_failures(const RunConfig& config, const Inputs& inputs, const CorrectionModel* corrections,
                                bool record_series, bool keep_units = false);

/// Text artifacts keyed by file name plus the process status.
struct RunResult {
    std::map<std::string, std::string> artifacts;
    int exit_code = 0;
    std::string summary;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitTargetNotMet = 4;

/// Runs one subcommand: simulate-wind, failure-rates, weights, assess or
/// strategies. Errors propagate as stormgrid::Error with the failing stage
/// prefixed to the message. `strict` turns an unmet R_set into exit code 4.
RunResult run_pipeline(const std::string& subcommand, const RunConfig& config, bool strict = false);

/// Writes every artifact under `dir` through temporary files renamed into
/// place, so a failure leaves no partial output.
void write_artifacts(const std::filesystem::path& dir, const std::map<std::string, std::string>& artifacts);

}  // namespace stormgrid
