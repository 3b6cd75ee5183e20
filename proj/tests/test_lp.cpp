#include <cmath>
#include <random>

#include "doctest.h"
#include "stormgrid/lp.hpp"

using namespace stormgrid;
using lp::Sense;

TEST_CASE("textbook maximization") {
    // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
    lp::Problem p;
    const auto x = p.add_variable(-3, 0, lp::kInfinity);
    const auto y = p.add_variable(-5, 0, lp::kInfinity);
    p.add_row({{x, 1}}, Sense::LessEqual, 4);
    p.add_row({{y, 2}}, Sense::LessEqual, 12);
    p.add_row({{x, 3}, {y, 2}}, Sense::LessEqual, 18);
    const auto s = lp::solve(p);
    REQUIRE(s.status == lp::Status::Optimal);
    CHECK(s.objective == doctest::Approx(-36));
    CHECK(s.x[x] == doctest::Approx(2));
    CHECK(s.x[y] == doctest::Approx(6));
}

TEST_CASE("equality rows, free and shifted variables") {
    // min x - y with x + y = 3, x free, -2 <= y <= 1
    lp::Problem p;
    const auto x = p.add_variable(1, -lp::kInfinity, lp::kInfinity);
    const auto y = p.add_variable(-1, -2, 1);
    p.add_row({{x, 1}, {y, 1}}, Sense::Equal, 3);
    const auto s = lp::solve(p);
    REQUIRE(s.status == lp::Status::Optimal);
    CHECK(s.x[y] == doctest::Approx(1));
    CHECK(s.x[x] == doctest::Approx(2));
    CHECK(s.objective == doctest::Approx(1));
}

TEST_CASE("variable with only an upper bound") {
    lp::Problem p;
    const auto x = p.add_variable(-1, -lp::kInfinity, 5);
    p.add_row({{x, 1}}, Sense::GreaterEqual, -3);
    const auto s = lp::solve(p);
    REQUIRE(s.status == lp::Status::Optimal);
    CHECK(s.x[x] == doctest::Approx(5));
}

TEST_CASE("infeasible and unbounded") {
    lp::Problem a;
    const auto x = a.add_variable(1, 0, lp::kInfinity);
    a.add_row({{x, 1}}, Sense::GreaterEqual, 5);
    a.add_row({{x, 1}}, Sense::LessEqual, 4);
    CHECK(lp::solve(a).status == lp::Status::Infeasible);

    lp::Problem b;
    const auto y = b.add_variable(-1, 0, lp::kInfinity);
    const auto z = b.add_variable(0, 0, lp::kInfinity);
    b.add_row({{y, 1}, {z, -1}}, Sense::LessEqual, 1);
    CHECK(lp::solve(b).status == lp::Status::Unbounded);

    lp::Problem c;
    CHECK_THROWS(c.add_variable(1, 3, 2));
}

TEST_CASE("degenerate problem terminates") {
    // several constraints through the same vertex
    lp::Problem p;
    const auto x = p.add_variable(-1, 0, lp::kInfinity);
    const auto y = p.add_variable(-1, 0, lp::kInfinity);
    for (int k = 1; k <= 6; ++k) p.add_row({{x, double(k)}, {y, 1}}, Sense::LessEqual, double(k));
    p.add_row({{x, 1}, {y, 1}}, Sense::LessEqual, 1);
    const auto s = lp::solve(p);
    REQUIRE(s.status == lp::Status::Optimal);
    CHECK(s.objective == doctest::Approx(-1));
}

namespace {

// brute force for two variables: best feasible vertex among line intersections
double vertex_oracle(const lp::Problem& p) {
    struct Line {
        double a, b, c;
    };
    std::vector<Line> lines;
    for (const auto& r : p.row_list()) {
        double a = 0, b = 0;
        for (const auto& t : r.terms) (t.var == 0 ? a : b) += t.coef;
        lines.push_back({a, b, r.rhs});
    }
    lines.push_back({1, 0, p.lower()[0]});
    lines.push_back({1, 0, p.upper()[0]});
    lines.push_back({0, 1, p.lower()[1]});
    lines.push_back({0, 1, p.upper()[1]});
    auto feasible = [&](double x, double y) {
        if (x < p.lower()[0] - 1e-7 || x > p.upper()[0] + 1e-7) return false;
        if (y < p.lower()[1] - 1e-7 || y > p.upper()[1] + 1e-7) return false;
        for (const auto& r : p.row_list()) {
            double v = 0;
            for (const auto& t : r.terms) v += t.coef * (t.var == 0 ? x : y);
            if (r.sense == Sense::LessEqual && v > r.rhs + 1e-7) return false;
            if (r.sense == Sense::GreaterEqual && v < r.rhs - 1e-7) return false;
        }
        return true;
    };
    double best = INFINITY;
    for (std::size_t i = 0; i < lines.size(); ++i)
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            const double det = lines[i].a * lines[j].b - lines[i].b * lines[j].a;
            if (std::abs(det) < 1e-12) continue;
            const double x = (lines[i].c * lines[j].b - lines[i].b * lines[j].c) / det;
            const double y = (lines[i].a * lines[j].c - lines[i].c * lines[j].a) / det;
            if (feasible(x, y)) best = std::min(best, p.cost()[0] * x + p.cost()[1] * y);
        }
    return best;
}

}  // namespace

TEST_CASE("random boxed 2-variable problems match vertex enumeration") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> u(-5, 5);
    int optimal = 0, infeasible = 0;
    for (int trial = 0; trial < 400; ++trial) {
        lp::Problem p;
        p.add_variable(u(rng), -10 + u(rng), 10 + u(rng));
        p.add_variable(u(rng), -10 + u(rng), 10 + u(rng));
        const int rows = 1 + trial % 5;
        for (int r = 0; r < rows; ++r) {
            const auto sense = static_cast<Sense>(r % 3 == 1 ? 2 : 0);
            p.add_row({{0, u(rng)}, {1, u(rng)}}, sense, 3 * u(rng));
        }
        const double oracle = vertex_oracle(p);
        const auto s = lp::solve(p);
        if (std::isinf(oracle)) {
            CHECK(s.status == lp::Status::Infeasible);
            ++infeasible;
        } else {
            REQUIRE(s.status == lp::Status::Optimal);
            CHECK(s.objective == doctest::Approx(oracle).epsilon(1e-7));
            ++optimal;
        }
    }
    CHECK(optimal > 100);
}
