#include "stormgrid/resilience_iise.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <sstream>
#include <thread>

#include "stormgrid/error.hpp"
#include "stormgrid/text_io.hpp"

namespace stormgrid {

std::vector<std::size_t> mask_members(StateMask mask) {
    std::vector<std::size_t> out;
    while (mask) {
        out.push_back(static_cast<std::size_t>(std::countr_zero(mask)));
        mask &= mask - 1;
    }
    return out;
}

StateMask mask_of(std::span<const std::size_t> corridors) {
    StateMask m = 0;
    for (auto c : corridors) {
        if (c >= 64) throw Error(ErrorKind::InvalidArgument, "state masks hold at most 64 corridors");
        m |= StateMask{1} << c;
    }
    return m;
}

ImpactFunction load_shed_impact(const NetworkCase& network, const ShedOptions& options) {
    const double base = min_load_shed(network, {}, options, "base").total_shed_mw;
    return [&network, options, base](std::span<const std::size_t> failed) {
        std::string id;
        for (auto c : failed) id += (id.empty() ? "" : "+") + std::to_string(network.corridors[c].id);
        return min_load_shed(network, failed, options, id).total_shed_mw - base;
    };
}

double impact_increment(StateMask state, const std::function<double(StateMask)>& impact,
                        std::unordered_map<StateMask, double>& memo) {
    if (state == 0) return 0.0;
    if (auto it = memo.find(state); it != memo.end()) return it->second;
    double value = impact(state);
    for (StateMask sub = (state - 1) & state; sub != 0; sub = (sub - 1) & state)
        value -= impact_increment(sub, impact, memo);
    memo.emplace(state, value);
    return value;
}

std::size_t state_count(std::size_t corridors, int order) {
    std::size_t total = 0;
    std::size_t binom = 1;
    for (int j = 0; j <= order && static_cast<std::size_t>(j) <= corridors; ++j) {
        total += binom;
        binom = binom * (corridors - j) / (j + 1);
    }
    return total;
}

namespace {

void combinations(std::size_t n, int k, std::size_t start, std::vector<std::size_t>& current,
                  std::vector<FaultState>& out) {
    if (static_cast<int>(current.size()) == k) {
        FaultState s;
        s.corridors = current;
        s.mask = mask_of(current);
        out.push_back(std::move(s));
        return;
    }
    for (std::size_t i = start; i < n; ++i) {
        current.push_back(i);
        combinations(n, k, i + 1, current, out);
        current.pop_back();
    }
}

}  // namespace

StateEnumeration::StateEnumeration(std::size_t corridors, int order) : corridors_(corridors), order_(order) {
    if (order < 1) throw Error(ErrorKind::InvalidArgument, "enumeration order must be at least 1");
    if (corridors > 64) throw Error(ErrorKind::InvalidArgument, "state masks hold at most 64 corridors");
    order_ = std::min<int>(order, static_cast<int>(corridors));
    std::vector<std::size_t> current;
    for (int j = 1; j <= order_; ++j) combinations(corridors, j, 0, current, states_);
    for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(states_[i].mask, i);
}

void StateEnumeration::evaluate(const ImpactFunction& impact, unsigned threads) {
    threads = std::max(1u, threads);
    std::size_t begin = 0;
    while (begin < states_.size()) {
        // one order at a time
        const std::size_t size = states_[begin].corridors.size();
        std::size_t end = begin;
        while (end < states_.size() && states_[end].corridors.size() == size) ++end;

        std::atomic<std::size_t> next{begin};
        std::exception_ptr failure;
        std::atomic<bool> failed{false};
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= end || failed.load()) return;
                try {
                    states_[i].impact = impact(states_[i].corridors);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                    return;
                }
            }
        };
        if (threads == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }
        if (failure) std::rethrow_exception(failure);

        for (std::size_t i = begin; i < end; ++i) {
            auto& s = states_[i];
            double value = s.impact;
            for (StateMask sub = (s.mask - 1) & s.mask; sub != 0; sub = (sub - 1) & s.mask)
                value -= states_[index_.at(sub)].increment;
            s.increment = value;
            for (auto c : s.corridors) {
                const StateMask sub = s.mask & ~(StateMask{1} << c);
                const double below = sub == 0 ? 0.0 : states_[index_.at(sub)].impact;
                if (s.impact < below - 1e-6) violations_.push_back({sub, s.mask, below, s.impact});
            }
        }
        begin = end;
    }
    evaluated_ = true;
}

double StateEnumeration::impact(StateMask mask) const {
    if (mask == 0) return 0.0;
    return states_[index_.at(mask)].impact;
}

double StateEnumeration::increment(StateMask mask) const {
    if (mask == 0) return 0.0;
    return states_[index_.at(mask)].increment;
}

ProbabilityTable harden(const ProbabilityTable& probabilities, std::span<const std::size_t> corridors,
                        HardeningMode mode) {
    ProbabilityTable out = probabilities;
    for (auto& row : out) {
        for (auto c : corridors) {
            if (c >= row.size()) throw Error(ErrorKind::UnknownCorridor, "corridor index " + std::to_string(c));
            row[c] = mode == HardeningMode::Eliminate ? 0.0 : row[c] * row[c];
        }
    }
    return out;
}

SystemIndex r_sys(const StateEnumeration& table, const ProbabilityTable& probabilities,
                  std::span<const double> scenario_weights) {
    if (probabilities.size() != scenario_weights.size())
        throw Error(ErrorKind::DimensionMismatch, "one weight per scenario is required");
    SystemIndex out;
    out.per_scenario.assign(probabilities.size(), 0.0);
    out.per_order.assign(static_cast<std::size_t>(table.order()), 0.0);
    for (std::size_t w = 0; w < probabilities.size(); ++w) {
        const auto& p = probabilities[w];
        if (p.size() != table.corridor_count())
            throw Error(ErrorKind::DimensionMismatch, "probability row does not match corridor count");
        double sum = 0.0;
        for (const auto& s : table.states()) {
            double weight = 1.0;
            for (auto c : s.corridors) weight *= p[c];
            const double term = weight * s.increment;
            sum += term;
            out.per_order[s.corridors.size() - 1] += scenario_weights[w] * term;
        }
        out.per_scenario[w] = sum;
        out.value += scenario_weights[w] * sum;
    }
    return out;
}

double r_corridor(std::size_t corridor, const StateEnumeration& table, const ProbabilityTable& probabilities,
                  std::span<const double> scenario_weights, HardeningMode mode) {
    const std::size_t one[] = {corridor};
    const double base = r_sys(table, probabilities, scenario_weights).value;
    return base - r_sys(table, harden(probabilities, one, mode), scenario_weights).value;
}

double truncated_mass(const ProbabilityTable& probabilities, std::span<const double> scenario_weights, int order) {
    double total = 0.0;
    for (std::size_t w = 0; w < probabilities.size(); ++w) {
        // distribution of the failure count, truncated at J+1 (absorbing)
        std::vector<double> dist(static_cast<std::size_t>(order) + 2, 0.0);
        dist[0] = 1.0;
        for (double p : probabilities[w]) {
            for (std::size_t k = dist.size() - 1; k > 0; --k) {
                const double stay = k == dist.size() - 1 ? dist[k] : dist[k] * (1.0 - p);
                dist[k] = stay + dist[k - 1] * p;
            }
            dist[0] *= 1.0 - p;
        }
        total += scenario_weights[w] * dist.back();
    }
    return total;
}

ResilienceReport assess_resilience(const NetworkCase& network, const StateEnumeration& table,
                                   const ProbabilityTable& probabilities, std::span<const double> scenario_weights,
                                   HardeningMode mode) {
    ResilienceReport report;
    const auto sys = r_sys(table, probabilities, scenario_weights);
    report.r_sys = sys.value;
    report.per_scenario = sys.per_scenario;
    report.per_order = sys.per_order;
    report.order = table.order();
    report.scenario_count = probabilities.size();
    report.evaluations = table.evaluations();
    report.truncated_mass = truncated_mass(probabilities, scenario_weights, table.order());
    report.violations = table.violations();
    for (std::size_t m = 0; m < network.corridors.size(); ++m) {
        const std::size_t one[] = {m};
        const double hardened = r_sys(table, harden(probabilities, one, mode), scenario_weights).value;
        report.corridors.push_back({network.corridors[m].id, sys.value - hardened});
    }
    std::stable_sort(report.corridors.begin(), report.corridors.end(), [](const auto& a, const auto& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.corridor_id < b.corridor_id;
    });
    return report;
}

std::string resilience_report_text(const NetworkCase& network, const ResilienceReport& report) {
    std::ostringstream out;
    out << "r_sys_mw\t" << format_sig(report.r_sys, 10) << '\n';
    out << "order\t" << report.order << '\n';
    out << "scenarios\t" << report.scenario_count << '\n';
    out << "states_per_scenario\t" << report.evaluations << '\n';
    out << "truncated_mass\t" << format_sig(report.truncated_mass, 6) << '\n';
    for (std::size_t j = 0; j < report.per_order.size(); ++j)
        out << "order_" << j + 1 << "_contribution_mw\t" << format_sig(report.per_order[j], 10) << '\n';
    out << "monotonicity_violations\t" << report.violations.size() << '\n';
    for (const auto& v : report.violations) {
        auto ids = [&](StateMask m) {
            std::string s;
            for (auto c : mask_members(m)) s += (s.empty() ? "" : "+") + std::to_string(network.corridors[c].id);
            return s.empty() ? std::string("none") : s;
        };
        out << "violation\t" << ids(v.subset) << '\t' << ids(v.superset) << '\t' << format_sig(v.subset_impact, 10)
            << '\t' << format_sig(v.superset_impact, 10) << '\n';
    }
    out << '\n' << "corridor\tr_m_mw\n";
    for (const auto& c : report.corridors) out << c.corridor_id << '\t' << format_sig(c.value, 10) << '\n';
    if (!report.scenario_labels.empty()) {
        out << '\n' << "scenario\tinner_sum_mw\n";
        for (std::size_t w = 0; w < report.per_scenario.size(); ++w)
            out << report.scenario_labels[w] << '\t' << format_sig(report.per_scenario[w], 10) << '\n';
    }
    return out.str();
}

}  // namespace stormgrid
