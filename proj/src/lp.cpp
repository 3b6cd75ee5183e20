#include "stormgrid/lp.hpp"

#include <algorithm>
#include <cmath>

#include "stormgrid/error.hpp"

namespace stormgrid::lp {

std::size_t Problem::add_variable(double cost, double lower, double upper) {
    if (lower > upper) throw Error(ErrorKind::InvalidArgument, "lp: variable lower bound exceeds upper bound");
    cost_.push_back(cost);
    lower_.push_back(lower);
    upper_.push_back(upper);
    return cost_.size() - 1;
}

void Problem::add_row(std::vector<Term> terms, Sense sense, double rhs) {
    for (const auto& t : terms)
        if (t.var >= cost_.size()) throw Error(ErrorKind::InvalidArgument, "lp: row references unknown variable");
    rows_.push_back({std::move(terms), sense, rhs});
}

const char* to_string(Status status) {
    switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration-limit";
    }
    return "unknown";
}

namespace {

// x_var = offset + sum(sign * y_col) over its standard-form columns.
struct VariableMap {
    double offset = 0.0;
    std::size_t col = 0;
    double sign = 1.0;
    std::size_t col2 = static_cast<std::size_t>(-1);  // negative part of a free variable
};

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), t_((rows + 1) * (cols + 1), 0.0) {}

    double& at(std::size_t r, std::size_t c) { return t_[r * (n_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return t_[r * (n_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, n_); }
    double rhs(std::size_t r) const { return at(r, n_); }
    double& cost(std::size_t c) { return at(m_, c); }
    double cost(std::size_t c) const { return at(m_, c); }
    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }

    void pivot(std::size_t pr, std::size_t pc) {
        const std::size_t w = n_ + 1;
        double* prow = &t_[pr * w];
        const double inv = 1.0 / prow[pc];
        for (std::size_t c = 0; c < w; ++c) prow[c] *= inv;
        prow[pc] = 1.0;
        for (std::size_t r = 0; r <= m_; ++r) {
            if (r == pr) continue;
            double* row = &t_[r * w];
            const double f = row[pc];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < w; ++c) row[c] -= f * prow[c];
            row[pc] = 0.0;
        }
    }

private:
    std::size_t m_;
    std::size_t n_;
    std::vector<double> t_;
};

enum class Outcome { Optimal, Unbounded, IterationLimit };

Outcome iterate(Tableau& t, std::vector<std::size_t>& basis, const std::vector<bool>& allowed, const Options& opt,
                std::size_t& iterations) {
    std::size_t degenerate_run = 0;
    for (;;) {
        if (iterations >= opt.max_iterations) return Outcome::IterationLimit;
        const bool bland = degenerate_run >= opt.degenerate_switch;
        std::size_t enter = t.cols();
        double best = -opt.tolerance;
        for (std::size_t c = 0; c < t.cols(); ++c) {
            if (!allowed[c]) continue;
            const double d = t.cost(c);
            if (d < best) {
                best = d;
                enter = c;
                if (bland) break;
            }
        }
        if (enter == t.cols()) return Outcome::Optimal;

        std::size_t leave = t.rows();
        double ratio = kInfinity;
        for (std::size_t r = 0; r < t.rows(); ++r) {
            const double a = t.at(r, enter);
            if (a <= opt.tolerance) continue;
            const double q = std::max(0.0, t.rhs(r)) / a;
            if (q < ratio - 1e-12 || (q <= ratio + 1e-12 && leave < t.rows() && basis[r] < basis[leave])) {
                ratio = q;
                leave = r;
            }
        }
        if (leave == t.rows()) return Outcome::Unbounded;
        degenerate_run = ratio <= opt.tolerance ? degenerate_run + 1 : 0;
        t.pivot(leave, enter);
        basis[leave] = enter;
        ++iterations;
    }
}

}  // namespace

Solution solve(const Problem& problem, const Options& options) {
    const std::size_t nv = problem.variables();

    // Structural columns and the bound rows they need.
    std::vector<VariableMap> map(nv);
    std::size_t cols = 0;
    struct BoundRow {
        std::size_t col;
        double ub;
    };
    std::vector<BoundRow> bound_rows;
    for (std::size_t v = 0; v < nv; ++v) {
        const double lo = problem.lower()[v];
        const double hi = problem.upper()[v];
        auto& vm = map[v];
        if (std::isfinite(lo)) {
            vm = {lo, cols++, 1.0};
            if (std::isfinite(hi)) bound_rows.push_back({vm.col, hi - lo});
        } else if (std::isfinite(hi)) {
            vm = {hi, cols++, -1.0};
        } else {
            vm.offset = 0.0;
            vm.col = cols++;
            vm.sign = 1.0;
            vm.col2 = cols++;
        }
    }
    const std::size_t structural = cols;

    // Rows in standard orientation (rhs >= 0).
    struct StdRow {
        std::vector<std::pair<std::size_t, double>> terms;
        Sense sense;
        double rhs;
    };
    std::vector<StdRow> rows;
    for (const auto& row : problem.row_list()) {
        StdRow sr;
        sr.sense = row.sense;
        sr.rhs = row.rhs;
        for (const auto& term : row.terms) {
            const auto& vm = map[term.var];
            sr.rhs -= term.coef * vm.offset;
            sr.terms.emplace_back(vm.col, term.coef * vm.sign);
            if (vm.col2 != static_cast<std::size_t>(-1)) sr.terms.emplace_back(vm.col2, -term.coef);
        }
        rows.push_back(std::move(sr));
    }
    for (const auto& br : bound_rows) rows.push_back({{{br.col, 1.0}}, Sense::LessEqual, br.ub});
    for (auto& r : rows) {
        if (r.rhs < 0.0) {
            r.rhs = -r.rhs;
            for (auto& term : r.terms) term.second = -term.second;
            if (r.sense == Sense::LessEqual)
                r.sense = Sense::GreaterEqual;
            else if (r.sense == Sense::GreaterEqual)
                r.sense = Sense::LessEqual;
        }
    }

    const std::size_t m = rows.size();
    std::size_t slack_cols = 0;
    std::size_t artificial_cols = 0;
    for (const auto& r : rows) {
        if (r.sense != Sense::Equal) ++slack_cols;
        if (r.sense != Sense::LessEqual) ++artificial_cols;
    }
    const std::size_t artificial_start = structural + slack_cols;
    const std::size_t total_cols = artificial_start + artificial_cols;

    Tableau t(m, total_cols);
    std::vector<std::size_t> basis(m);
    std::size_t next_slack = structural;
    std::size_t next_art = artificial_start;
    for (std::size_t r = 0; r < m; ++r) {
        for (const auto& [c, a] : rows[r].terms) t.at(r, c) += a;
        t.rhs(r) = rows[r].rhs;
        switch (rows[r].sense) {
        case Sense::LessEqual:
            t.at(r, next_slack) = 1.0;
            basis[r] = next_slack++;
            break;
        case Sense::GreaterEqual:
            t.at(r, next_slack++) = -1.0;
            t.at(r, next_art) = 1.0;
            basis[r] = next_art++;
            break;
        case Sense::Equal:
            t.at(r, next_art) = 1.0;
            basis[r] = next_art++;
            break;
        }
    }

    Solution sol;
    std::vector<bool> allowed(total_cols, true);

    // Phase 1: minimize the sum of artificials.
    if (artificial_cols > 0) {
        for (std::size_t c = 0; c <= total_cols; ++c) t.at(m, c) = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
            if (basis[r] < artificial_start) continue;
            for (std::size_t c = 0; c <= total_cols; ++c) t.at(m, c) -= t.at(r, c);
        }
        for (std::size_t r = 0; r < m; ++r) t.at(m, basis[r]) = 0.0;
        const auto outcome = iterate(t, basis, allowed, options, sol.iterations);
        if (outcome == Outcome::IterationLimit) {
            sol.status = Status::IterationLimit;
            return sol;
        }
        double scale = 1.0;
        for (const auto& r : rows) scale = std::max(scale, std::abs(r.rhs));
        if (-t.rhs(m) > 1e-7 * scale) {
            sol.status = Status::Infeasible;
            return sol;
        }
        // Drive remaining zero-valued artificials out of the basis.
        for (std::size_t r = 0; r < m; ++r) {
            if (basis[r] < artificial_start) continue;
            for (std::size_t c = 0; c < artificial_start; ++c) {
                if (std::abs(t.at(r, c)) > 1e-7) {
                    t.pivot(r, c);
                    basis[r] = c;
                    break;
                }
            }
        }
        for (std::size_t c = artificial_start; c < total_cols; ++c) allowed[c] = false;
    }

    // Phase 2 objective row: reduced costs of the original objective.
    std::vector<double> c_std(total_cols, 0.0);
    double c_offset = 0.0;
    for (std::size_t v = 0; v < nv; ++v) {
        const auto& vm = map[v];
        const double c = problem.cost()[v];
        c_offset += c * vm.offset;
        c_std[vm.col] += c * vm.sign;
        if (vm.col2 != static_cast<std::size_t>(-1)) c_std[vm.col2] -= c;
    }
    for (std::size_t c = 0; c < total_cols; ++c) t.at(m, c) = c_std[c];
    t.rhs(m) = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
        const double cb = c_std[basis[r]];
        if (cb == 0.0) continue;
        for (std::size_t c = 0; c <= total_cols; ++c) t.at(m, c) -= cb * t.at(r, c);
    }
    const auto outcome = iterate(t, basis, allowed, options, sol.iterations);
    if (outcome == Outcome::IterationLimit) {
        sol.status = Status::IterationLimit;
        return sol;
    }
    if (outcome == Outcome::Unbounded) {
        sol.status = Status::Unbounded;
        return sol;
    }

    std::vector<double> y(total_cols, 0.0);
    for (std::size_t r = 0; r < m; ++r) y[basis[r]] = t.rhs(r);
    sol.x.assign(nv, 0.0);
    sol.objective = c_offset;
    for (std::size_t v = 0; v < nv; ++v) {
        const auto& vm = map[v];
        double x = vm.offset + vm.sign * y[vm.col];
        if (vm.col2 != static_cast<std::size_t>(-1)) x -= y[vm.col2];
        sol.x[v] = x;
    }
    sol.objective = 0.0;
    for (std::size_t v = 0; v < nv; ++v) sol.objective += problem.cost()[v] * sol.x[v];
    sol.status = Status::Optimal;
    return sol;
}

}  // namespace stormgrid::lp
