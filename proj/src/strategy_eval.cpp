#include "stormgrid/strategy_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "stormgrid/error.hpp"
#include "stormgrid/text_io.hpp"

namespace stormgrid {

StrategyResult strategy_metrics(std::string name, double cost, double re, double r_sys, double r_set) {
    StrategyResult r;
    r.name = std::move(name);
    r.cost = cost;
    r.re = re;
    r.delta_re_pct = r_sys > 0.0 ? 100.0 * re / r_sys : 0.0;
    r.cost_per_pct = r.delta_re_pct > 0.0 ? cost / r.delta_re_pct : std::numeric_limits<double>::infinity();
    r.post_index = r_sys - re;
    r.meets_target = r.post_index <= r_set;
    return r;
}

double strategy_cost(const NetworkCase& network, const Strategy& strategy) {
    double cost = 0.0;
    for (int id : strategy.corridor_ids) cost += network.corridors[network.corridor_index(id)].length_km;
    return cost * strategy.cost_per_km;
}

StrategyResult evaluate_strategy(const NetworkCase& network, const Strategy& strategy, const StateEnumeration& table,
                                 const ProbabilityTable& probabilities, std::span<const double> scenario_weights,
                                 double r_sys_value, double r_set, HardeningMode mode) {
    if (strategy.corridor_ids.empty())
        throw Error(ErrorKind::InvalidArgument, "strategy '" + strategy.name + "' reinforces no corridor");
    std::vector<std::size_t> indices;
    for (int id : strategy.corridor_ids) indices.push_back(network.corridor_index(id));
    const double hardened = r_sys(table, harden(probabilities, indices, mode), scenario_weights).value;
    return strategy_metrics(strategy.name, strategy_cost(network, strategy), r_sys_value - hardened, r_sys_value,
                            r_set);
}

std::vector<StrategyResult> rank_strategies(std::vector<StrategyResult> results) {
    std::stable_sort(results.begin(), results.end(), [](const auto& a, const auto& b) {
        if (a.cost_per_pct != b.cost_per_pct) return a.cost_per_pct < b.cost_per_pct;
        if (a.cost != b.cost) return a.cost < b.cost;
        return a.name < b.name;
    });
    return results;
}

std::vector<Strategy> parse_strategies(std::string_view text, double cost_per_km) {
    std::vector<Strategy> out;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        std::string cleaned(t);
        std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
        std::replace(cleaned.begin(), cleaned.end(), '\t', ' ');
        std::istringstream fields(cleaned);
        Strategy s;
        s.cost_per_km = cost_per_km;
        fields >> s.name;
        std::string tok;
        std::vector<std::string> rest;
        while (fields >> tok) rest.push_back(tok);
        if (out.empty() && !rest.empty() && rest.front() == "corridors") continue;
        for (const auto& r : rest) {
            try {
                s.corridor_ids.push_back(parse_int(r, "corridor id"));
            } catch (const Error&) {
                throw Error(ErrorKind::ParseError,
                            "strategies line " + std::to_string(line_no) + ": bad corridor id '" + r + "'");
            }
        }
        if (s.corridor_ids.empty())
            throw Error(ErrorKind::ParseError, "strategies line " + std::to_string(line_no) + ": no corridors");
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Strategy> load_strategies(const std::filesystem::path& path, double cost_per_km) {
    return parse_strategies(read_file(path), cost_per_km);
}

std::string strategy_table_text(const std::vector<StrategyResult>& ranked) {
    std::ostringstream out;
    out << "priority\tstrategy\tcost_usd\tre_mw\tdelta_re_pct\tcost_per_pct\tpost_index_mw\tmeets_target\n";
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& r = ranked[i];
        out << i + 1 << '\t' << r.name << '\t' << format_sig(r.cost, 8) << '\t' << format_sig(r.re, 8) << '\t'
            << format_sig(r.delta_re_pct, 6) << '\t' << format_sig(r.cost_per_pct, 6) << '\t'
            << format_sig(r.post_index, 8) << '\t' << (r.meets_target ? "yes" : "no") << '\n';
    }
    return out.str();
}

std::string normalized_metrics_text(const std::vector<StrategyResult>& ranked) {
    double max_c = 0, max_re = 0, max_pct = 0, max_ratio = 0;
    for (const auto& r : ranked) {
        max_c = std::max(max_c, r.cost);
        max_re = std::max(max_re, r.re);
        max_pct = std::max(max_pct, r.delta_re_pct);
        if (std::isfinite(r.cost_per_pct)) max_ratio = std::max(max_ratio, r.cost_per_pct);
    }
    auto scaled = [](double v, double m) { return m > 0.0 && std::isfinite(v) ? v / m : 0.0; };
    std::ostringstream out;
    out << "strategy\tcost\tre\tdelta_re\tcost_per_pct\n";
    for (const auto& r : ranked) {
        out << r.name << '\t' << format_sig(scaled(r.cost, max_c), 6) << '\t' << format_sig(scaled(r.re, max_re), 6)
            << '\t' << format_sig(scaled(r.delta_re_pct, max_pct), 6) << '\t'
            << format_sig(scaled(r.cost_per_pct, max_ratio), 6) << '\n';
    }
    return out.str();
}

}  // namespace stormgrid
