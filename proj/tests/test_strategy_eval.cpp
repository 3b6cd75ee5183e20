#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "stormgrid/error.hpp"
#include "stormgrid/strategy_eval.hpp"
#include "stormgrid/text_io.hpp"

using namespace stormgrid;

namespace {

const std::string kData = STORMGRID_DATA_DIR;

NetworkCase toy(const std::string& name) {
    const auto dir = kData + "/toy/" + name + "/";
    return load_case({dir + "buses.csv", dir + "generators.csv", dir + "corridors.csv", std::nullopt});
}

struct PrintedRow {
    int priority;
    std::string name;
    double cost, re, delta, ratio;
};

std::vector<PrintedRow> printed_rows() {
    std::ifstream in(kData + "/reference/strategy_costs.csv");
    std::string line;
    std::getline(in, line);
    std::vector<PrintedRow> rows;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        PrintedRow r;
        std::string f;
        std::getline(ss, f, ',');
        r.priority = std::stoi(f);
        std::getline(ss, r.name, ',');
        std::getline(ss, f, ',');
        r.cost = std::stod(f);
        std::getline(ss, f, ',');
        r.re = std::stod(f);
        std::getline(ss, f, ',');
        r.delta = std::stod(f);
        std::getline(ss, f, ',');
        r.ratio = std::stod(f);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace

TEST_CASE("metrics") {
    const auto r = strategy_metrics("S", 2e6, 3.0, 12.0, 10.0);
    CHECK(r.delta_re_pct == doctest::Approx(25.0));
    CHECK(r.cost_per_pct == doctest::Approx(2e6 / 25.0));
    CHECK(r.post_index == doctest::Approx(9.0));
    CHECK(r.meets_target);
    CHECK_FALSE(strategy_metrics("S", 2e6, 1.0, 12.0, 10.0).meets_target);
    CHECK(strategy_metrics("S", 2e6, 2.0, 12.0, 10.0).meets_target);
}

TEST_CASE("ranking order and ties") {
    std::vector<StrategyResult> rs;
    rs.push_back(strategy_metrics("b", 200, 1, 10, 0));  // ratio 20
    rs.push_back(strategy_metrics("a", 100, 1, 10, 0));  // ratio 10
    rs.push_back(strategy_metrics("d", 300, 3, 10, 0));  // ratio 10, higher cost
    rs.push_back(strategy_metrics("c", 100, 1, 10, 0));  // ties with a
    const auto ranked = rank_strategies(rs);
    CHECK(ranked[0].name == "a");
    CHECK(ranked[1].name == "c");
    CHECK(ranked[2].name == "d");
    CHECK(ranked[3].name == "b");
}

TEST_CASE("published strategy rows") {
    const double r_sys = 23.67e-5;
    const auto rows = printed_rows();
    REQUIRE(rows.size() == 6);
    std::vector<StrategyResult> results;
    for (const auto& row : rows) {
        const auto r = strategy_metrics(row.name, row.cost, row.re, r_sys, 17e-5);
        const double delta = 100 * row.re / r_sys;
        CHECK(r.delta_re_pct == doctest::Approx(delta).epsilon(1e-12));
        CHECK(r.cost_per_pct == doctest::Approx(row.cost / delta).epsilon(1e-12));
        results.push_back(r);
    }
    // the first five rows agree with their printed derived columns
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(std::abs(results[i].delta_re_pct / rows[i].delta - 1) < 0.005);
        CHECK(std::abs(results[i].cost_per_pct / rows[i].ratio - 1) < 0.005);
    }
    // the last row's printed delta does not follow from its RE
    CHECK(results[5].delta_re_pct == doctest::Approx(29.827).epsilon(1e-4));
    const auto ranked = rank_strategies(results);
    for (std::size_t i = 0; i < 6; ++i) CHECK(ranked[i].name == rows[i].name);
}

TEST_CASE("parse strategies") {
    const auto s = parse_strategies("name,corridors\nA,1,2\nB 3 4 5\n\n# note\nC,7\n", 2e6);
    REQUIRE(s.size() == 3);
    CHECK(s[0].corridor_ids == std::vector<int>{1, 2});
    CHECK(s[1].corridor_ids == std::vector<int>{3, 4, 5});
    CHECK(s[2].cost_per_km == 2e6);
    CHECK_THROWS_AS(parse_strategies("A,x\n"), Error);
    const auto bundled = load_strategies(kData + "/rts79/strategies.csv");
    CHECK(bundled.size() == 6);
}

TEST_CASE("strategy evaluation on a toy grid") {
    const auto net = toy("bus4");
    StateEnumeration e(5, 5);
    e.evaluate(load_shed_impact(net));
    const ProbabilityTable probs{{0.05, 0.2, 0.1, 0.3, 0.02}, {0.1, 0.1, 0.1, 0.1, 0.1}};
    const std::vector<double> w{0.7, 0.3};
    const double total = r_sys(e, probs, w).value;
    const Strategy st{"pair", {2, 4}, 1000.0};
    const auto r = evaluate_strategy(net, st, e, probs, w, total, 0.0);
    const std::vector<std::size_t> idx{1, 3};
    const double hardened = r_sys(e, harden(probs, idx, HardeningMode::Eliminate), w).value;
    CHECK(r.re == doctest::Approx(total - hardened).epsilon(1e-12));
    CHECK(r.cost == doctest::Approx(1000.0 * (net.corridors[1].length_km + net.corridors[3].length_km)));
    CHECK(strategy_cost(net, st) == doctest::Approx(r.cost));
    CHECK_THROWS_AS(strategy_cost(net, Strategy{"x", {99}}), Error);
    CHECK_THROWS_AS(evaluate_strategy(net, Strategy{"none", {}}, e, probs, w, total, 0.0), Error);

    std::vector<StrategyResult> list{r, strategy_metrics("other", 5.0, 0.1, total, 0.0)};
    const auto table = strategy_table_text(rank_strategies(list));
    CHECK(table.rfind("priority\tstrategy", 0) == 0);
    const auto norm = normalized_metrics_text(rank_strategies(list));
    CHECK(norm.find("\t1\t") != std::string::npos);
}
