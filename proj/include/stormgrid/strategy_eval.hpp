#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stormgrid/grid_case.hpp"
#include "stormgrid/resilience_iise.hpp"

namespace stormgrid {

inline constexpr double kDefaultCostPerKm = 1e6;  // $/km

struct Strategy {
    std::string name;
    std::vector<int> corridor_ids;
    double cost_per_km = kDefaultCostPerKm;
};

struct StrategyResult {
    std::string name;
    double cost = 0.0;           // $
    double re = 0.0;             // MW
    double delta_re_pct = 0.0;   // 100 RE / R_sys
    double cost_per_pct = 0.0;   // C / ΔRE, $ per %
    double post_index = 0.0;     // R_sys - RE
    bool meets_target = false;
};

/// Derived fields from C, RE, R_sys and the target.
StrategyResult strategy_metrics(std::string name, double cost, double re, double r_sys, double r_set);

/// Cost of reinforcing every corridor in the strategy. Throws UnknownCorridor.
double strategy_cost(const NetworkCase& network, const Strategy& strategy);

StrategyResult evaluate_strategy(const NetworkCase& network, const Strategy& strategy, const StateEnumeration& table,
                                 const ProbabilityTable& probabilities, std::span<const double> scenario_weights,
                                 double r_sys, double r_set, HardeningMode mode = HardeningMode::Eliminate);

/// Ascending C/ΔRE, then lower C, then name.
std::vector<StrategyResult> rank_strategies(std::vector<StrategyResult> results);

/// One line per strategy: name followed by corridor ids, separated by
/// commas or whitespace. A leading "name,corridors" header is optional.
std::vector<Strategy> parse_strategies(std::string_view text, double cost_per_km = kDefaultCostPerKm);
std::vector<Strategy> load_strategies(const std::filesystem::path& path, double cost_per_km = kDefaultCostPerKm);

/// Ranked table with priority column.
std::string strategy_table_text(const std::vector<StrategyResult>& ranked);

/// Each metric divided by its maximum over the strategies.
std::string normalized_metrics_text(const std::vector<StrategyResult>& ranked);

}  // namespace stormgrid
