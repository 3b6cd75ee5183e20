#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stormgrid/importance.hpp"

namespace stormgrid {

/// Reciprocal pairwise comparison matrix on the Saaty 1-9 scale, labelled
/// by feature name.
struct PairwiseMatrix {
    std::vector<std::string> features;
    std::vector<double> entries;  // row-major, size n*n

    std::size_t size() const { return features.size(); }
    double at(std::size_t i, std::size_t j) const { return entries[i * size() + j]; }

    /// Throws NonReciprocalMatrix if a_ii != 1, a_ij a_ji != 1 (to 1e-9) or
    /// an entry leaves [1/9, 9].
    void validate() const;
    /// Same matrix with rows and columns permuted into `order`. Throws
    /// UnknownFeature if a name is missing.
    PairwiseMatrix aligned(std::span<const std::string> order) const;
};

/// Header row and first column carry feature names; fractions like 1/7 are accepted.
PairwiseMatrix parse_pairwise(std::string_view text, std::string source = "<text>");
PairwiseMatrix load_pairwise(const std::filesystem::path& path);

enum class PriorityMethod { GeometricMean, ColumnNormalization };

struct AhpResult {
    std::vector<double> priority;
    double lambda_max = 0.0;
    double consistency_ratio = 0.0;

    bool acceptable() const { return consistency_ratio <= 0.10; }
};

/// Saaty random consistency index for n <= 10.
double random_index(std::size_t n);

AhpResult ahp_priority(const PairwiseMatrix& matrix, PriorityMethod method = PriorityMethod::GeometricMean);

/// Scheme x feature weights, columns in a declared feature order.
struct DecisionMatrix {
    std::vector<std::string> schemes;
    std::vector<std::string> features;
    std::vector<std::vector<double>> rows;
};

/// Rows taken from each scheme by feature name, so schemes listed in
/// different column orders line up. Rows must be non-negative and sum to
/// 1 within 0.01 (published tables are rounded).
DecisionMatrix build_decision_matrix(std::span<const WeightScheme> schemes, std::span<const std::string> order);

/// D = Y q. Throws DimensionMismatch.
std::vector<double> waa_scores(const DecisionMatrix& y, std::span<const double> q);

struct Selection {
    std::size_t index = 0;
    bool tie = false;
};

/// Argmax of D, lowest index wins ties.
Selection select_scheme(std::span<const double> scores);

/// (scheme, feature, weight) triples.
std::vector<WeightScheme> parse_weight_schemes(std::string_view text, std::string source = "<text>");
std::vector<WeightScheme> load_weight_schemes(const std::filesystem::path& path);
std::string weight_schemes_to_text(std::span<const WeightScheme> schemes);

}  // namespace stormgrid
