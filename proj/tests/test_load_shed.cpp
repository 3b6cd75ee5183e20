#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "stormgrid/error.hpp"
#include "stormgrid/load_shed.hpp"

using namespace stormgrid;

namespace {

const std::string kData = STORMGRID_DATA_DIR;

NetworkCase toy(const std::string& name) {
    const auto dir = kData + "/toy/" + name + "/";
    return load_case({dir + "buses.csv", dir + "generators.csv", dir + "corridors.csv", std::nullopt});
}

NetworkCase rts() {
    const auto dir = kData + "/rts79/";
    return load_case({dir + "buses.csv", dir + "generators.csv", dir + "corridors.csv", std::nullopt});
}

std::vector<std::size_t> members(unsigned mask, std::size_t n) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1) out.push_back(i);
    return out;
}

}  // namespace

TEST_CASE("three-bus bottleneck") {
    const auto net = toy("bus3");
    const std::vector<std::size_t> none;
    CHECK(min_load_shed(net, none).total_shed_mw == doctest::Approx(0.0).epsilon(1e-9));
    const std::vector<std::size_t> direct{2};
    const auto s = min_load_shed(net, direct);
    CHECK(s.total_shed_mw == doctest::Approx(40.0).epsilon(1e-9));
    CHECK(s.status == ShedStatus::Optimal);
    CHECK(s.bus_shed_mw[2] == doctest::Approx(40.0));
    CHECK(s.corridor_flow_mw[2] == 0.0);
    CHECK(std::abs(s.corridor_flow_mw[0]) == doctest::Approx(60.0));
    CHECK(max_violation(net, direct, s) < 1e-6);
    CHECK_FALSE(s.binding.empty());
}

TEST_CASE("toy contingencies match exhaustive search") {
    for (const char* name : {"bus3", "bus4"}) {
        const auto net = toy(name);
        const std::size_t n = net.corridors.size();
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            const auto failed = members(mask, n);
            std::vector<bool> flags(n, false);
            for (auto c : failed) flags[c] = true;
            const auto s = min_load_shed(net, failed);
            const double brute = oracle::exhaustive_shed(net, flags);
            INFO(name << " mask " << mask);
            CHECK(s.total_shed_mw <= brute + 1e-6);
            CHECK(s.total_shed_mw >= brute - 0.1 - 1e-9);
            CHECK(max_violation(net, failed, s) < 1e-6);
        }
    }
}

TEST_CASE("islands") {
    const auto net = toy("bus4");
    const std::vector<std::size_t> none;
    CHECK(islands(net, none).size() == 1);
    // isolate bus 4
    const std::vector<std::size_t> cut{3, 4};
    const auto parts = islands(net, cut);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0] == std::vector<std::size_t>{0, 1, 2});
    CHECK(parts[1] == std::vector<std::size_t>{3});
    const auto s = min_load_shed(net, cut);
    CHECK(s.bus_shed_mw[3] == doctest::Approx(70.0));
    CHECK(s.islands.size() == 2);
}

TEST_CASE("generator minimums relax when they cannot be met") {
    CaseText text;
    text.buses = "id,load_mw\n1,0\n2,30\n";
    text.generators = "bus,pmax_mw,pmin_mw\n1,100,50\n2,10,0\n";
    text.corridors = "id,from,to,x_pu,limit_mw\n1,1,2,0.1,100\n";
    const auto net = parse_case(text);
    const std::vector<std::size_t> none;
    const auto intact = min_load_shed(net, none);
    CHECK(intact.status == ShedStatus::InfeasibleDegenerate);
    CHECK(intact.total_shed_mw == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(std::string(to_string(intact.status)) == "infeasible-degenerate");

    const std::vector<std::size_t> cut{0};
    const auto split = min_load_shed(net, cut);
    CHECK(split.total_shed_mw == doctest::Approx(20.0));
    CHECK(split.generator_mw[0] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("per-generator dispatch respects limits") {
    CaseText text;
    text.buses = "id,load_mw\n1,0\n2,100\n";
    text.generators = "bus,pmax_mw,pmin_mw\n1,60,10\n1,60,20\n";
    text.corridors = "id,from,to,x_pu,limit_mw\n1,1,2,0.1,150\n";
    const auto net = parse_case(text);
    const std::vector<std::size_t> none;
    const auto s = min_load_shed(net, none);
    CHECK(s.total_shed_mw == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(s.generator_mw[0] + s.generator_mw[1] == doctest::Approx(100.0));
    for (std::size_t g = 0; g < 2; ++g) {
        CHECK(s.generator_mw[g] >= net.generators[g].pmin_mw - 1e-9);
        CHECK(s.generator_mw[g] <= net.generators[g].pmax_mw + 1e-9);
    }
}

TEST_CASE("RTS base case is secure and single outages are feasible") {
    const auto net = rts();
    const std::vector<std::size_t> none;
    const auto base = min_load_shed(net, none);
    CHECK(base.total_shed_mw < 1e-6);
    CHECK(max_violation(net, none, base) < 1e-6);
    for (std::size_t c = 0; c < net.corridors.size(); ++c) {
        const std::vector<std::size_t> one{c};
        const auto s = min_load_shed(net, one);
        CHECK(s.total_shed_mw >= -1e-9);
        CHECK(s.total_shed_mw <= net.total_load_mw() + 1e-6);
        CHECK(max_violation(net, one, s) < 1e-6);
    }
}

TEST_CASE("debug dump names the state") {
    const auto net = toy("bus3");
    const std::vector<std::size_t> direct{2};
    const auto s = min_load_shed(net, direct, {}, "s-13");
    const auto text = debug_dump(net, "s-13", direct, s);
    CHECK(text.find("s-13") != std::string::npos);
    CHECK(text.find("40") != std::string::npos);
}
