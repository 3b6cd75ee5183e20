#include "stormgrid/load_shed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "stormgrid/error.hpp"
#include "stormgrid/text_io.hpp"

namespace stormgrid {

const char* to_string(ShedStatus status) {
    return status == ShedStatus::Optimal ? "optimal" : "infeasible-degenerate";
}

namespace {

std::vector<bool> failed_mask(const NetworkCase& network, std::span<const std::size_t> failed) {
    std::vector<bool> mask(network.corridors.size(), false);
    for (auto f : failed) {
        if (f >= mask.size()) throw Error(ErrorKind::UnknownCorridor, "corridor index " + std::to_string(f));
        mask[f] = true;
    }
    return mask;
}

}  // namespace

std::vector<std::vector<std::size_t>> islands(const NetworkCase& network, std::span<const std::size_t> failed) {
    const auto down = failed_mask(network, failed);
    const std::size_t n = network.buses.size();
    std::vector<std::vector<std::size_t>> adjacency(n);
    for (std::size_t c = 0; c < network.corridors.size(); ++c) {
        if (down[c]) continue;
        const auto a = network.bus_index(network.corridors[c].from_bus);
        const auto b = network.bus_index(network.corridors[c].to_bus);
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
    }
    std::vector<std::size_t> by_id(n);
    std::iota(by_id.begin(), by_id.end(), 0);
    std::sort(by_id.begin(), by_id.end(),
              [&](std::size_t a, std::size_t b) { return network.buses[a].id < network.buses[b].id; });
    std::vector<bool> seen(n, false);
    std::vector<std::vector<std::size_t>> out;
    for (auto start : by_id) {
        if (seen[start]) continue;
        std::vector<std::size_t> island;
        std::vector<std::size_t> stack{start};
        seen[start] = true;
        while (!stack.empty()) {
            const auto b = stack.back();
            stack.pop_back();
            island.push_back(b);
            for (auto nb : adjacency[b]) {
                if (!seen[nb]) {
                    seen[nb] = true;
                    stack.push_back(nb);
                }
            }
        }
        std::sort(island.begin(), island.end(),
                  [&](std::size_t a, std::size_t b) { return network.buses[a].id < network.buses[b].id; });
        out.push_back(std::move(island));
    }
    return out;
}

namespace {

struct BusGeneration {
    double pmin = 0.0;
    double pmax = 0.0;
};

struct IslandResult {
    std::vector<double> shed;   // per island bus
    std::vector<double> gen;    // aggregated per island bus
    std::vector<double> theta;  // per island bus, reference = 0
    bool degenerate = false;
};

class IslandSolver {
public:
    IslandSolver(const NetworkCase& network, const std::vector<bool>& down, const std::vector<BusGeneration>& gen,
                 const ShedOptions& options, const std::string& state_id)
        : network_(network), down_(down), gen_(gen), options_(options), state_id_(state_id) {}

    IslandResult solve(const std::vector<std::size_t>& buses) const {
        IslandResult result;
        const std::size_t n = buses.size();
        result.shed.assign(n, 0.0);
        result.gen.assign(n, 0.0);
        result.theta.assign(n, 0.0);
        double capacity = 0.0;
        for (auto b : buses) capacity += gen_[b].pmax;
        if (capacity <= 0.0) {
            for (std::size_t i = 0; i < n; ++i) result.shed[i] = network_.buses[buses[i]].load_mw;
            return result;
        }
        for (int attempt = 0; attempt <= options_.reference_retries; ++attempt) {
            const std::size_t reference = static_cast<std::size_t>(attempt) % n;
            auto sol = solve_lp(buses, reference, false, result);
            if (sol == lp::Status::Infeasible) {
                sol = solve_lp(buses, reference, true, result);
                result.degenerate = true;
            }
            if (sol == lp::Status::Optimal) return result;
            result.degenerate = false;
        }
        throw Error(ErrorKind::NumericFailure,
                    "load-shedding LP failed for state '" + state_id_ + "' on island of bus " +
                        std::to_string(network_.buses[buses.front()].id));
    }

private:
    lp::Status solve_lp(const std::vector<std::size_t>& buses, std::size_t reference, bool relax_pmin,
                        IslandResult& out) const {
        const std::size_t n = buses.size();
        std::vector<long> local(network_.buses.size(), -1);
        for (std::size_t i = 0; i < n; ++i) local[buses[i]] = static_cast<long>(i);

        lp::Problem p;
        constexpr std::size_t kNone = static_cast<std::size_t>(-1);
        std::vector<std::size_t> theta(n, kNone);
        std::vector<std::size_t> g(n, kNone);
        std::vector<std::size_t> s(n, kNone);
        for (std::size_t i = 0; i < n; ++i) {
            if (i != reference) theta[i] = p.add_variable(0.0, -lp::kInfinity, lp::kInfinity);
            const auto& bg = gen_[buses[i]];
            if (bg.pmax > 0.0) g[i] = p.add_variable(0.0, relax_pmin ? 0.0 : bg.pmin, bg.pmax);
            const double load = network_.buses[buses[i]].load_mw;
            if (load > 0.0) s[i] = p.add_variable(1.0, 0.0, load);
        }
        std::vector<std::vector<lp::Term>> balance(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (g[i] != kNone) balance[i].push_back({g[i], 1.0});
            if (s[i] != kNone) balance[i].push_back({s[i], 1.0});
        }
        for (std::size_t c = 0; c < network_.corridors.size(); ++c) {
            if (down_[c]) continue;
            const auto& cor = network_.corridors[c];
            const long a = local[network_.bus_index(cor.from_bus)];
            const long b = local[network_.bus_index(cor.to_bus)];
            if (a < 0 || b < 0) continue;
            const double susceptance = network_.base_mva / cor.reactance_pu;
            std::vector<lp::Term> flow;
            if (theta[a] != kNone) flow.push_back({theta[a], susceptance});
            if (theta[b] != kNone) flow.push_back({theta[b], -susceptance});
            // flow leaves a and enters b
            for (const auto& t : flow) {
                balance[a].push_back({t.var, -t.coef});
                balance[b].push_back({t.var, t.coef});
            }
            if (!flow.empty()) {
                p.add_row(flow, lp::Sense::LessEqual, cor.limit_mw);
                p.add_row(flow, lp::Sense::GreaterEqual, -cor.limit_mw);
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            p.add_row(balance[i], lp::Sense::Equal, network_.buses[buses[i]].load_mw);

        const auto sol = lp::solve(p, options_.lp);
        if (sol.status != lp::Status::Optimal) return sol.status;
        for (std::size_t i = 0; i < n; ++i) {
            out.theta[i] = theta[i] == kNone ? 0.0 : sol.x[theta[i]];
            out.gen[i] = g[i] == kNone ? 0.0 : sol.x[g[i]];
            out.shed[i] = s[i] == kNone ? 0.0 : std::clamp(sol.x[s[i]], 0.0, network_.buses[buses[i]].load_mw);
        }
        return lp::Status::Optimal;
    }

    const NetworkCase& network_;
    const std::vector<bool>& down_;
    const std::vector<BusGeneration>& gen_;
    const ShedOptions& options_;
    const std::string& state_id_;
};

std::vector<BusGeneration> aggregate_generation(const NetworkCase& network) {
    std::vector<BusGeneration> gen(network.buses.size());
    for (const auto& g : network.generators) {
        auto& bg = gen[network.bus_index(g.bus)];
        bg.pmin += g.pmin_mw;
        bg.pmax += g.pmax_mw;
    }
    return gen;
}

}  // namespace

SheddingSolution min_load_shed(const NetworkCase& network, std::span<const std::size_t> failed,
                               const ShedOptions& options, const std::string& state_id) {
    const auto down = failed_mask(network, failed);
    const auto gen = aggregate_generation(network);
    SheddingSolution out;
    out.islands = islands(network, failed);
    out.bus_shed_mw.assign(network.buses.size(), 0.0);
    out.generator_mw.assign(network.generators.size(), 0.0);
    out.corridor_flow_mw.assign(network.corridors.size(), 0.0);
    std::vector<double> bus_gen(network.buses.size(), 0.0);
    std::vector<double> theta(network.buses.size(), 0.0);

    const IslandSolver solver(network, down, gen, options, state_id);
    for (const auto& island : out.islands) {
        const auto r = solver.solve(island);
        if (r.degenerate) out.status = ShedStatus::InfeasibleDegenerate;
        for (std::size_t i = 0; i < island.size(); ++i) {
            out.bus_shed_mw[island[i]] = r.shed[i];
            bus_gen[island[i]] = r.gen[i];
            theta[island[i]] = r.theta[i];
        }
    }
    for (double s : out.bus_shed_mw) out.total_shed_mw += s;

    // Split each bus's dispatch across its units in proportion to headroom.
    for (std::size_t b = 0; b < network.buses.size(); ++b) {
        const double headroom = gen[b].pmax - gen[b].pmin;
        const double above_min = bus_gen[b] - gen[b].pmin;
        for (std::size_t k = 0; k < network.generators.size(); ++k) {
            const auto& g = network.generators[k];
            if (network.bus_index(g.bus) != b) continue;
            if (above_min >= 0.0) {
                out.generator_mw[k] = g.pmin_mw + (headroom > 0.0 ? above_min * (g.pmax_mw - g.pmin_mw) / headroom : 0.0);
            } else {
                // relaxed minimums: scale everything down
                out.generator_mw[k] = gen[b].pmax > 0.0 ? bus_gen[b] * g.pmax_mw / gen[b].pmax : 0.0;
            }
        }
    }
    for (std::size_t c = 0; c < network.corridors.size(); ++c) {
        if (down[c]) continue;
        const auto& cor = network.corridors[c];
        const auto a = network.bus_index(cor.from_bus);
        const auto b = network.bus_index(cor.to_bus);
        out.corridor_flow_mw[c] = network.base_mva * (theta[a] - theta[b]) / cor.reactance_pu;
        if (std::abs(std::abs(out.corridor_flow_mw[c]) - cor.limit_mw) <= 1e-6)
            out.binding.push_back("flow_limit corridor " + std::to_string(cor.id));
    }
    for (std::size_t b = 0; b < network.buses.size(); ++b) {
        if (out.bus_shed_mw[b] > 1e-9) out.binding.push_back("shed bus " + std::to_string(network.buses[b].id));
        if (gen[b].pmax > 0.0 && bus_gen[b] >= gen[b].pmax - 1e-6)
            out.binding.push_back("pmax bus " + std::to_string(network.buses[b].id));
    }
    return out;
}

double max_violation(const NetworkCase& network, std::span<const std::size_t> failed,
                     const SheddingSolution& solution) {
    const auto down = failed_mask(network, failed);
    double worst = 0.0;
    std::vector<double> net(network.buses.size(), 0.0);
    for (std::size_t b = 0; b < network.buses.size(); ++b) {
        const double d = network.buses[b].load_mw;
        const double s = solution.bus_shed_mw[b];
        worst = std::max({worst, -s, s - d});
        net[b] -= d - s;
    }
    for (std::size_t k = 0; k < network.generators.size(); ++k) {
        const auto& g = network.generators[k];
        const double p = solution.generator_mw[k];
        if (solution.status == ShedStatus::Optimal) worst = std::max(worst, g.pmin_mw - p);
        worst = std::max({worst, p - g.pmax_mw, -p});
        net[network.bus_index(g.bus)] += p;
    }
    for (std::size_t c = 0; c < network.corridors.size(); ++c) {
        const auto& cor = network.corridors[c];
        const double f = solution.corridor_flow_mw[c];
        if (down[c]) {
            worst = std::max(worst, std::abs(f));
            continue;
        }
        worst = std::max(worst, std::abs(f) - cor.limit_mw);
        net[network.bus_index(cor.from_bus)] -= f;
        net[network.bus_index(cor.to_bus)] += f;
    }
    for (double r : net) worst = std::max(worst, std::abs(r));
    // Flows must derive from a single angle per bus: check each loop of the
    // surviving graph through the spanning forest used for angle recovery.
    std::vector<double> theta(network.buses.size(), 0.0);
    std::vector<bool> placed(network.buses.size(), false);
    for (const auto& island : solution.islands) {
        if (island.empty()) continue;
        placed[island.front()] = true;
        bool progress = true;
        while (progress) {
            progress = false;
            for (std::size_t c = 0; c < network.corridors.size(); ++c) {
                if (down[c]) continue;
                const auto& cor = network.corridors[c];
                const auto a = network.bus_index(cor.from_bus);
                const auto b = network.bus_index(cor.to_bus);
                const double dtheta = solution.corridor_flow_mw[c] * cor.reactance_pu / network.base_mva;
                if (placed[a] && !placed[b]) {
                    theta[b] = theta[a] - dtheta;
                    placed[b] = progress = true;
                } else if (placed[b] && !placed[a]) {
                    theta[a] = theta[b] + dtheta;
                    placed[a] = progress = true;
                }
            }
        }
    }
    for (std::size_t c = 0; c < network.corridors.size(); ++c) {
        if (down[c]) continue;
        const auto& cor = network.corridors[c];
        const auto a = network.bus_index(cor.from_bus);
        const auto b = network.bus_index(cor.to_bus);
        const double implied = network.base_mva * (theta[a] - theta[b]) / cor.reactance_pu;
        worst = std::max(worst, std::abs(implied - solution.corridor_flow_mw[c]));
    }
    return worst;
}

std::string debug_dump(const NetworkCase& network, const std::string& state_id, std::span<const std::size_t> failed,
                       const SheddingSolution& solution) {
    std::ostringstream out;
    out << "state " << state_id << '\n';
    out << "failed";
    for (auto f : failed) out << ' ' << network.corridors[f].id;
    out << '\n';
    for (std::size_t i = 0; i < solution.islands.size(); ++i) {
        out << "island " << i << ':';
        for (auto b : solution.islands[i]) out << ' ' << network.buses[b].id;
        out << '\n';
    }
    out << "status " << to_string(solution.status) << '\n';
    out << "objective_mw " << format_number(solution.total_shed_mw) << '\n';
    for (const auto& b : solution.binding) out << "binding " << b << '\n';
    return out.str();
}

}  // namespace stormgrid
