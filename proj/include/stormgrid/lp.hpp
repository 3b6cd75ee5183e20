#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace stormgrid::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { LessEqual, Equal, GreaterEqual };

struct Term {
    std::size_t var;
    double coef;
};

/// minimize c'x subject to linear rows and lower <= x <= upper. Bounds may
/// be infinite.
class Problem {
public:
    std::size_t add_variable(double cost, double lower, double upper);
    void add_row(std::vector<Term> terms, Sense sense, double rhs);

    std::size_t variables() const { return cost_.size(); }
    std::size_t rows() const { return rows_.size(); }

    struct Row {
        std::vector<Term> terms;
        Sense sense;
        double rhs;
    };

    const std::vector<double>& cost() const { return cost_; }
    const std::vector<double>& lower() const { return lower_; }
    const std::vector<double>& upper() const { return upper_; }
    const std::vector<Row>& row_list() const { return rows_; }

private:
    std::vector<double> cost_;
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<Row> rows_;
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(Status status);

struct Solution {
    Status status = Status::Infeasible;
    double objective = 0.0;
    std::vector<double> x;
    std::size_t iterations = 0;
};

struct Options {
    double tolerance = 1e-9;
    std::size_t max_iterations = 100000;
    /// Consecutive degenerate pivots before switching from Dantzig pricing
    /// to Bland's rule.
    std::size_t degenerate_switch = 50;
};

/// Dense two-phase tableau simplex. Intended for a few hundred variables.
Solution solve(const Problem& problem, const Options& options = {});

}  // namespace stormgrid::lp
