#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "stormgrid/feature_engine.hpp"

namespace stormgrid {

/// Labelled fault / no-fault samples, row-major.
struct Dataset {
    std::vector<std::string> feature_names;
    std::vector<double> values;
    std::vector<int> labels;  // 1 = fault, 0 = no fault
    std::string provenance;

    std::size_t rows() const { return labels.size(); }
    std::size_t features() const { return feature_names.size(); }
    double at(std::size_t row, std::size_t feature) const { return values[row * features() + feature]; }
    std::span<const double> row(std::size_t r) const { return {values.data() + r * features(), features()}; }

    /// At least two rows, finite values, labels in {0, 1}.
    void validate() const;
};

/// Delimiter-separated file with the seven canonical feature columns (any
/// order, matched by name) and a `label` column.
Dataset load_dataset(const std::filesystem::path& path);
Dataset parse_dataset(std::string_view text, std::string source = "<text>");
std::string dataset_to_text(const Dataset& data);

struct WeightScheme {
    std::string name;
    std::vector<std::string> features;
    std::vector<double> weights;

    double weight_of(std::string_view feature) const;
};

// --- random forest ----------------------------------------------------------

struct TreeNode {
    int feature = -1;  // -1 for a leaf
    double threshold = 0.0;  // go left when value <= threshold
    int left = -1;
    int right = -1;
    std::array<std::size_t, 2> class_counts{};
    double gini = 0.0;
    int prediction = 0;

    bool leaf() const { return feature < 0; }
    std::size_t samples() const { return class_counts[0] + class_counts[1]; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::vector<std::size_t> bootstrap;
    std::vector<std::size_t> out_of_bag;

    int predict(std::span<const double> row) const;
    friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct ForestConfig {
    int trees = 100;
    int max_depth = 12;        // 0 = unlimited
    int min_leaf = 3;
    std::uint64_t seed = 0;
    int features_per_split = 0;  // 0 = floor(sqrt(features))
};

struct Forest {
    std::vector<DecisionTree> trees;
    std::size_t feature_count = 0;
    std::vector<std::string> feature_names;

    int predict(std::span<const double> row) const;
    /// Fraction of rows misclassified by the majority vote of the trees for
    /// which the row is out of bag (rows that are in every bootstrap are skipped).
    double oob_error(const Dataset& data) const;
    friend bool operator==(const Forest&, const Forest&) = default;
};

/// 1 - sum p_k^2 over the two classes.
double gini_impurity(std::size_t class0, std::size_t class1);

/// Bootstrap CART trees with Gini splits. Throws SingleClassDataset.
Forest train_forest(const Dataset& data, const ForestConfig& config);

/// Mean decrease in impurity, each split weighted by the fraction of the
/// tree's bootstrap sample reaching it; averaged over trees, normalized.
WeightScheme gini_importance(const Forest& forest);

enum class OobNoise { Permute, Gaussian };

struct OobOptions {
    OobNoise noise = OobNoise::Permute;
    std::uint64_t seed = 0;
    bool identity_permutation = false;  // test hook: noise that changes nothing
};

/// Per-feature mean over trees of (OOB error with the column perturbed) -
/// (baseline OOB error). Raw, may be negative. Throws EmptyOutOfBag.
std::vector<double> oob_raw_importance(const Forest& forest, const Dataset& data, const OobOptions& options);

/// Raw importances floored at zero and normalized. Throws
/// DegenerateImportance when nothing survives the floor.
WeightScheme oob_importance(const Forest& forest, const Dataset& data, const OobOptions& options = {});

/// Entropy weight method over an n x m matrix (row-major). Each column is
/// min-max normalized toward its hazardous end per `signs`; a constant
/// column has entropy 1 and weight 0. Throws AllColumnsConstant.
WeightScheme entropy_weights(std::span<const double> values, std::size_t rows, std::size_t cols,
                             std::span<const Sign> signs);
WeightScheme entropy_weights(const Dataset& data, std::span<const FeatureRange> ranges);

/// Stand-in training corpus: features uniform over `ranges`, label drawn
/// from a logistic link on the planted-weight composite score. The offset
/// is bisected so exactly half the rows are faults.
Dataset synthesize_dataset(std::uint64_t seed, std::size_t size, std::span<const double> planted_weights,
                           std::span<const FeatureRange> ranges, double sharpness = 20.0);

}  // namespace stormgrid
