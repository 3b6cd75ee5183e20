#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "stormgrid/grid_case.hpp"
#include "stormgrid/load_shed.hpp"

namespace stormgrid {

/// Failed-corridor set as a bitmask over corridor indices (at most 64).
using StateMask = std::uint64_t;

std::vector<std::size_t> mask_members(StateMask mask);
StateMask mask_of(std::span<const std::size_t> corridors);

/// I(s) for a failed set given as ascending corridor indices.
using ImpactFunction = std::function<double(std::span<const std::size_t>)>;

/// Load shed relative to the intact network: I(s) = shed(s) - shed(empty).
/// The returned function is safe to call concurrently.
ImpactFunction load_shed_impact(const NetworkCase& network, const ShedOptions& options = {});

/// Memoized ΔI(s) = I(s) - sum of ΔI over proper nonempty subsets of s.
double impact_increment(StateMask state, const std::function<double(StateMask)>& impact,
                        std::unordered_map<StateMask, double>& memo);

/// Number of states of order 0..J over n corridors.
std::size_t state_count(std::size_t corridors, int order);

struct FaultState {
    StateMask mask = 0;
    std::vector<std::size_t> corridors;
    double impact = 0.0;
    double increment = 0.0;
};

struct MonotonicityViolation {
    StateMask subset = 0;
    StateMask superset = 0;
    double subset_impact = 0.0;
    double superset_impact = 0.0;
};

/// All nonempty fault states up to order J with their impacts and
/// increments. Impacts depend only on the failed set, so one table serves
/// every scenario and every hardening variant.
class StateEnumeration {
public:
    StateEnumeration(std::size_t corridors, int order);

    /// Evaluates impacts order by order (in parallel within an order), then
    /// increments. Results do not depend on `threads`.
    void evaluate(const ImpactFunction& impact, unsigned threads = 1);

    std::size_t corridor_count() const { return corridors_; }
    int order() const { return order_; }
    const std::vector<FaultState>& states() const { return states_; }
    /// Impact evaluations including the empty state.
    std::size_t evaluations() const { return states_.size() + 1; }
    double impact(StateMask mask) const;
    double increment(StateMask mask) const;
    const std::vector<MonotonicityViolation>& violations() const { return violations_; }

private:
    std::size_t corridors_;
    int order_;
    std::vector<FaultState> states_;
    std::unordered_map<StateMask, std::size_t> index_;
    std::vector<MonotonicityViolation> violations_;
    bool evaluated_ = false;
};

/// Corridor failure probabilities, [scenario][corridor].
using ProbabilityTable = std::vector<std::vector<double>>;

enum class HardeningMode {
    Eliminate,   // p -> 0
    Redundancy,  // p -> p^2, a parallel backup corridor
};

ProbabilityTable harden(const ProbabilityTable& probabilities, std::span<const std::size_t> corridors,
                        HardeningMode mode);

struct SystemIndex {
    double value = 0.0;
    std::vector<double> per_scenario;  // unweighted inner sums
    std::vector<double> per_order;     // weighted contribution of each order 1..J
};

/// R_sys = sum_w P_w sum_{|s| <= J} (prod_{i in s} p_wi) ΔI(s).
SystemIndex r_sys(const StateEnumeration& table, const ProbabilityTable& probabilities,
                  std::span<const double> scenario_weights);

/// R_m = R_sys - R_sys with corridor m hardened.
double r_corridor(std::size_t corridor, const StateEnumeration& table, const ProbabilityTable& probabilities,
                  std::span<const double> scenario_weights, HardeningMode mode = HardeningMode::Eliminate);

/// Probability-weighted chance that more than J corridors fail together,
/// the mass the truncated enumeration never sees.
double truncated_mass(const ProbabilityTable& probabilities, std::span<const double> scenario_weights, int order);

struct CorridorIndex {
    int corridor_id = 0;
    double value = 0.0;
};

struct ResilienceReport {
    double r_sys = 0.0;
    std::vector<CorridorIndex> corridors;  // descending by value, then id
    std::vector<double> per_scenario;
    std::vector<double> per_order;
    std::vector<std::string> scenario_labels;
    int order = 0;
    std::size_t scenario_count = 0;
    std::size_t evaluations = 0;
    double truncated_mass = 0.0;
    std::vector<MonotonicityViolation> violations;
};

ResilienceReport assess_resilience(const NetworkCase& network, const StateEnumeration& table,
                                   const ProbabilityTable& probabilities, std::span<const double> scenario_weights,
                                   HardeningMode mode = HardeningMode::Eliminate);

std::string resilience_report_text(const NetworkCase& network, const ResilienceReport& report);

}  // namespace stormgrid
