#include "stormgrid/ahp_decision.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "stormgrid/error.hpp"
#include "stormgrid/text_io.hpp"

namespace stormgrid {

void PairwiseMatrix::validate() const {
    const std::size_t n = size();
    if (entries.size() != n * n) throw Error(ErrorKind::DimensionMismatch, "pairwise matrix is not square");
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(at(i, i) - 1.0) > 1e-9)
            throw Error(ErrorKind::NonReciprocalMatrix, "diagonal entry for " + features[i] + " is not 1");
        for (std::size_t j = 0; j < n; ++j) {
            const double a = at(i, j);
            if (!(a >= 1.0 / 9.0 - 1e-9 && a <= 9.0 + 1e-9))
                throw Error(ErrorKind::NonReciprocalMatrix,
                            features[i] + "/" + features[j] + " = " + format_number(a) + " is off the 1-9 scale");
            if (std::abs(a * at(j, i) - 1.0) > 1e-9)
                throw Error(ErrorKind::NonReciprocalMatrix, features[i] + "/" + features[j] + " is not reciprocal");
        }
    }
}

PairwiseMatrix PairwiseMatrix::aligned(std::span<const std::string> order) const {
    if (order.size() != size())
        throw Error(ErrorKind::DimensionMismatch, "pairwise matrix has " + std::to_string(size()) +
                                                      " features, order has " + std::to_string(order.size()));
    std::vector<std::size_t> source;
    for (const auto& name : order) {
        const auto it = std::find(features.begin(), features.end(), name);
        if (it == features.end()) throw Error(ErrorKind::UnknownFeature, "pairwise matrix lacks '" + name + "'");
        source.push_back(static_cast<std::size_t>(it - features.begin()));
    }
    PairwiseMatrix out;
    out.features.assign(order.begin(), order.end());
    out.entries.resize(entries.size());
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out.entries[i * n + j] = at(source[i], source[j]);
    return out;
}

PairwiseMatrix parse_pairwise(std::string_view text, std::string source) {
    const auto table = parse_table(text, source);
    PairwiseMatrix m;
    m.features.assign(table.header.begin() + 1, table.header.end());
    const std::size_t n = m.features.size();
    if (table.rows.size() != n)
        throw Error(ErrorKind::DimensionMismatch, source + ": expected " + std::to_string(n) + " matrix rows");
    m.entries.assign(n * n, 0.0);
    std::vector<bool> seen(n, false);
    for (std::size_t r = 0; r < n; ++r) {
        const auto& row = table.rows[r];
        const auto it = std::find(m.features.begin(), m.features.end(), row[0]);
        if (it == m.features.end())
            throw Error(ErrorKind::UnknownFeature, source + ": row label '" + row[0] + "' is not a column");
        const auto i = static_cast<std::size_t>(it - m.features.begin());
        if (seen[i]) throw Error(ErrorKind::DuplicateId, source + ": row '" + row[0] + "' repeated");
        seen[i] = true;
        for (std::size_t j = 0; j < n; ++j)
            m.entries[i * n + j] = parse_number(row[j + 1], source + ":" + std::to_string(table.line_numbers[r]));
    }
    m.validate();
    return m;
}

PairwiseMatrix load_pairwise(const std::filesystem::path& path) {
    return parse_pairwise(read_file(path), path.string());
}

double random_index(std::size_t n) {
    static constexpr double kRandomIndex[] = {0.0, 0.0, 0.0, 0.58, 0.90, 1.12, 1.24, 1.32, 1.41, 1.45, 1.49};
    if (n > 10) throw Error(ErrorKind::InvalidArgument, "random index tabulated for n <= 10 only");
    return kRandomIndex[n];
}

AhpResult ahp_priority(const PairwiseMatrix& matrix, PriorityMethod method) {
    matrix.validate();
    const std::size_t n = matrix.size();
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "empty pairwise matrix");
    AhpResult result;
    result.priority.assign(n, 0.0);
    if (method == PriorityMethod::GeometricMean) {
        for (std::size_t i = 0; i < n; ++i) {
            double log_sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) log_sum += std::log(matrix.at(i, j));
            result.priority[i] = std::exp(log_sum / static_cast<double>(n));
        }
    } else {
        for (std::size_t j = 0; j < n; ++j) {
            double col = 0.0;
            for (std::size_t i = 0; i < n; ++i) col += matrix.at(i, j);
            for (std::size_t i = 0; i < n; ++i) result.priority[i] += matrix.at(i, j) / col / static_cast<double>(n);
        }
    }
    double sum = 0.0;
    for (double q : result.priority) sum += q;
    for (double& q : result.priority) q /= sum;

    double lambda = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double aq = 0.0;
        for (std::size_t j = 0; j < n; ++j) aq += matrix.at(i, j) * result.priority[j];
        lambda += aq / result.priority[i];
    }
    result.lambda_max = lambda / static_cast<double>(n);
    if (n > 2) {
        const double ci = (result.lambda_max - static_cast<double>(n)) / static_cast<double>(n - 1);
        result.consistency_ratio = std::max(0.0, ci / random_index(n));
    }
    return result;
}

DecisionMatrix build_decision_matrix(std::span<const WeightScheme> schemes, std::span<const std::string> order) {
    DecisionMatrix y;
    y.features.assign(order.begin(), order.end());
    for (const auto& scheme : schemes) {
        if (scheme.features.size() != order.size())
            throw Error(ErrorKind::DimensionMismatch, "scheme " + scheme.name + " has " +
                                                          std::to_string(scheme.features.size()) + " features");
        std::vector<double> row;
        double sum = 0.0;
        for (const auto& feature : order) {
            const double w = scheme.weight_of(feature);
            if (w < 0.0) throw Error(ErrorKind::InvalidArgument, "scheme " + scheme.name + " has a negative weight");
            row.push_back(w);
            sum += w;
        }
        if (std::abs(sum - 1.0) > 0.01)
            throw Error(ErrorKind::InvalidArgument, "scheme " + scheme.name + " weights sum to " + format_number(sum));
        y.schemes.push_back(scheme.name);
        y.rows.push_back(std::move(row));
    }
    return y;
}

std::vector<double> waa_scores(const DecisionMatrix& y, std::span<const double> q) {
    if (q.size() != y.features.size())
        throw Error(ErrorKind::DimensionMismatch, "priority vector length " + std::to_string(q.size()) +
                                                      " != feature count " + std::to_string(y.features.size()));
    std::vector<double> d;
    for (const auto& row : y.rows) {
        if (row.size() != q.size()) throw Error(ErrorKind::DimensionMismatch, "ragged decision matrix");
        double s = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) s += row[j] * q[j];
        d.push_back(s);
    }
    return d;
}

Selection select_scheme(std::span<const double> scores) {
    if (scores.empty()) throw Error(ErrorKind::InvalidArgument, "no scheme scores");
    Selection s;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[s.index]) s.index = i;
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (i != s.index && scores[i] == scores[s.index]) s.tie = true;
    return s;
}

std::vector<WeightScheme> parse_weight_schemes(std::string_view text, std::string source) {
    const auto table = parse_table(text, source);
    const auto cs = table.column("scheme");
    const auto cf = table.column("feature");
    const auto cw = table.column("weight");
    std::vector<WeightScheme> out;
    std::map<std::string, std::size_t> index;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        auto [it, inserted] = index.emplace(row[cs], out.size());
        if (inserted) out.push_back({row[cs], {}, {}});
        auto& scheme = out[it->second];
        if (std::find(scheme.features.begin(), scheme.features.end(), row[cf]) != scheme.features.end())
            throw Error(ErrorKind::DuplicateId, source + ": " + row[cs] + "/" + row[cf] + " repeated");
        scheme.features.push_back(row[cf]);
        scheme.weights.push_back(parse_number(row[cw], source + ":" + std::to_string(table.line_numbers[r])));
    }
    return out;
}

std::vector<WeightScheme> load_weight_schemes(const std::filesystem::path& path) {
    return parse_weight_schemes(read_file(path), path.string());
}

std::string weight_schemes_to_text(std::span<const WeightScheme> schemes) {
    std::ostringstream out;
    out << "scheme,feature,weight\n";
    for (const auto& s : schemes)
        for (std::size_t i = 0; i < s.features.size(); ++i)
            out << s.name << ',' << s.features[i] << ',' << format_number(s.weights[i]) << '\n';
    return out.str();
}

}  // namespace stormgrid
