#pragma once

#include <span>
#include <string>
#include <vector>

#include "stormgrid/grid_case.hpp"
#include "stormgrid/lp.hpp"

namespace stormgrid {

/// Connected components of the network with the `failed` corridors (indices
/// into NetworkCase::corridors) removed. Each island lists bus indices in
/// ascending bus-id order; islands are ordered by their lowest bus id.
std::vector<std::vector<std::size_t>> islands(const NetworkCase& network, std::span<const std::size_t> failed);

enum class ShedStatus {
    Optimal,
    /// Generator minimums could not be met in some island; that island was
    /// re-solved with its units allowed to drop to zero.
    InfeasibleDegenerate,
};

const char* to_string(ShedStatus status);

struct SheddingSolution {
    double total_shed_mw = 0.0;
    std::vector<double> bus_shed_mw;     // per bus index
    std::vector<double> generator_mw;    // per generator index
    std::vector<double> corridor_flow_mw;  // per corridor index, 0 for failed corridors
    std::vector<std::vector<std::size_t>> islands;
    ShedStatus status = ShedStatus::Optimal;
    std::vector<std::string> binding;    // human-readable active constraints
};

struct ShedOptions {
    lp::Options lp;
    /// Alternative reference buses tried after a numerical failure.
    int reference_retries = 3;
};

/// Minimum total load curtailment under DC power flow, generator limits and
/// corridor flow limits, solved island by island. Islands without
/// generation shed their whole load. Throws NumericFailure naming `state_id`
/// if the LP fails on every reference choice.
SheddingSolution min_load_shed(const NetworkCase& network, std::span<const std::size_t> failed,
                               const ShedOptions& options = {}, const std::string& state_id = {});

/// Largest constraint violation of `solution` (MW): nodal balance, flow
/// limits, generator and shed bounds. Angles are recovered per island.
double max_violation(const NetworkCase& network, std::span<const std::size_t> failed,
                     const SheddingSolution& solution);

/// Structured text: state id, failed set, islands, objective, binding constraints.
std::string debug_dump(const NetworkCase& network, const std::string& state_id, std::span<const std::size_t> failed,
                       const SheddingSolution& solution);

}  // namespace stormgrid
