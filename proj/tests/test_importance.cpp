#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "stormgrid/error.hpp"
#include "stormgrid/importance.hpp"

using namespace stormgrid;

namespace {

// label copies a threshold on column 0, the rest is noise
Dataset label_copy_data(std::uint64_t seed, std::size_t rows = 400, std::size_t cols = 4) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Dataset d;
    for (std::size_t j = 0; j < cols; ++j) d.feature_names.push_back("f" + std::to_string(j));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) d.values.push_back(u(rng));
        d.labels.push_back(d.values[i * cols] > 0.5 ? 1 : 0);
    }
    return d;
}

std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("gini impurity") {
    CHECK(gini_impurity(10, 0) == 0.0);
    CHECK(gini_impurity(0, 7) == 0.0);
    CHECK(gini_impurity(5, 5) == doctest::Approx(0.5));
    CHECK(gini_impurity(1, 3) == doctest::Approx(1 - 0.0625 - 0.5625));
}

TEST_CASE("separable toy is fit exactly by one tree") {
    Dataset d;
    d.feature_names = {"a", "b"};
    d.values = {0.1, 5, 0.2, 1, 0.8, 4, 0.9, 2};
    d.labels = {0, 0, 1, 1};
    ForestConfig cfg;
    cfg.trees = 1;
    cfg.min_leaf = 1;
    cfg.features_per_split = 2;
    cfg.seed = 0;
    const auto forest = train_forest(d, cfg);
    // the tree only saw its bootstrap; check it is perfect on that sample
    const auto& tree = forest.trees[0];
    for (auto r : tree.bootstrap) CHECK(tree.predict(d.row(r)) == d.labels[r]);
    // and a threshold on column a separates the full data, so such a split exists
    bool exists = false;
    for (double t : {0.1, 0.2, 0.8})
        exists = exists || (d.at(0, 0) <= t && d.at(1, 0) <= t && d.at(2, 0) > t && d.at(3, 0) > t);
    CHECK(exists);
}

TEST_CASE("single class data is rejected") {
    Dataset d = label_copy_data(1, 20);
    std::fill(d.labels.begin(), d.labels.end(), 1);
    try {
        train_forest(d, {});
        FAIL("expected SingleClassDataset");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SingleClassDataset);
    }
}

TEST_CASE("training is deterministic per seed") {
    const auto d = label_copy_data(3, 200);
    ForestConfig cfg;
    cfg.trees = 10;
    cfg.seed = 42;
    CHECK(train_forest(d, cfg) == train_forest(d, cfg));
    auto other = cfg;
    other.seed = 43;
    CHECK_FALSE(train_forest(d, cfg) == train_forest(d, other));
}

TEST_CASE("splits never increase weighted impurity") {
    const auto d = label_copy_data(5, 300, 5);
    ForestConfig cfg;
    cfg.trees = 5;
    cfg.seed = 9;
    for (const auto& tree : train_forest(d, cfg).trees) {
        for (const auto& node : tree.nodes) {
            if (node.leaf()) continue;
            const auto& l = tree.nodes[node.left];
            const auto& r = tree.nodes[node.right];
            CHECK(l.samples() + r.samples() == node.samples());
            const double child = (l.gini * l.samples() + r.gini * r.samples()) / node.samples();
            CHECK(child <= node.gini + 1e-12);
        }
    }
}

TEST_CASE("label-copy feature dominates both forest schemes") {
    const auto d = label_copy_data(11);
    ForestConfig cfg;
    cfg.trees = 50;
    cfg.seed = 1;
    const auto forest = train_forest(d, cfg);
    const auto gini = gini_importance(forest);
    CHECK(gini.weights[0] > 0.8);
    CHECK(sum(gini.weights) == doctest::Approx(1.0).epsilon(1e-12));

    const auto oob = oob_importance(forest, d, {OobNoise::Permute, 7});
    CHECK(argmax(oob.weights) == 0);
    for (std::size_t j = 1; j < oob.weights.size(); ++j) CHECK(oob.weights[j] < 0.05);
    for (double w : oob.weights) CHECK(w >= 0.0);
    CHECK(sum(oob.weights) == doctest::Approx(1.0).epsilon(1e-12));

    const auto gaussian = oob_importance(forest, d, {OobNoise::Gaussian, 7});
    CHECK(argmax(gaussian.weights) == 0);
    CHECK(forest.oob_error(d) < 0.2);
}

TEST_CASE("identity permutation leaves the OOB error unchanged") {
    const auto d = label_copy_data(2, 200);
    ForestConfig cfg;
    cfg.trees = 20;
    const auto forest = train_forest(d, cfg);
    OobOptions opt;
    opt.identity_permutation = true;
    for (double v : oob_raw_importance(forest, d, opt)) CHECK(v == 0.0);
    CHECK_THROWS_AS(oob_importance(forest, d, opt), Error);
}

TEST_CASE("entropy weights") {
    const std::vector<Sign> plus2{Sign::Positive, Sign::Positive};
    // column 0 constant, column 1 varying
    const std::vector<double> m{3, 1, 3, 2, 3, 7, 3, 4};
    const auto w = entropy_weights(m, 4, 2, plus2);
    CHECK(w.weights[0] == 0.0);
    CHECK(w.weights[1] == doctest::Approx(1.0));

    const std::vector<double> flat{1, 1, 1, 1};
    try {
        entropy_weights(flat, 2, 2, plus2);
        FAIL("expected AllColumnsConstant");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::AllColumnsConstant);
    }

    // independent evaluation of the entropy weight formula
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    const std::size_t n = 30, c = 4;
    std::vector<double> x(n * c);
    for (double& v : x) v = u(rng);
    const std::vector<Sign> signs{Sign::Positive, Sign::Negative, Sign::Positive, Sign::Negative};
    const auto got = entropy_weights(x, n, c, signs);
    std::vector<double> d(c);
    for (std::size_t j = 0; j < c; ++j) {
        std::vector<double> col;
        for (std::size_t i = 0; i < n; ++i) col.push_back(x[i * c + j]);
        const double lo = *std::min_element(col.begin(), col.end());
        const double hi = *std::max_element(col.begin(), col.end());
        for (double& v : col) v = signs[j] == Sign::Positive ? (v - lo) / (hi - lo) : (hi - v) / (hi - lo);
        const double s = sum(col);
        double e = 0;
        for (double v : col)
            if (v > 0) e -= (v / s) * std::log(v / s);
        d[j] = 1 - e / std::log(double(n));
    }
    const double total = sum(d);
    for (std::size_t j = 0; j < c; ++j) CHECK(got.weights[j] == doctest::Approx(d[j] / total).epsilon(1e-12));
    CHECK(std::abs(sum(got.weights) - 1.0) < 1e-12);

    // affine rescale of a column does not move the weights
    auto scaled = x;
    for (std::size_t i = 0; i < n; ++i) scaled[i * c + 2] = 4.5 * scaled[i * c + 2] - 17;
    const auto again = entropy_weights(scaled, n, c, signs);
    for (std::size_t j = 0; j < c; ++j) CHECK(again.weights[j] == doctest::Approx(got.weights[j]).epsilon(1e-12));
}

TEST_CASE("synthetic dataset") {
    const auto ranges = default_feature_ranges();
    const std::vector<double> planted{0.30, 0.20, 0.15, 0.10, 0.10, 0.10, 0.05};
    const auto a = synthesize_dataset(7, 640, planted, ranges);
    const auto b = synthesize_dataset(7, 640, planted, ranges);
    CHECK(a.values == b.values);
    CHECK(a.labels == b.labels);
    CHECK(a.rows() == 640);
    const double faults = std::accumulate(a.labels.begin(), a.labels.end(), 0.0) / 640.0;
    CHECK(faults >= 0.45);
    CHECK(faults <= 0.55);
    CHECK(a.provenance == "synthetic(7)");
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            CHECK(a.at(r, j) >= ranges[j].min);
            CHECK(a.at(r, j) <= ranges[j].max);
        }
    CHECK_THROWS_AS(synthesize_dataset(7, 5, planted, ranges), Error);
}

TEST_CASE("planted max_wind is recovered") {
    const auto ranges = default_feature_ranges();
    std::vector<double> planted(kFeatureCount, 0.0);
    planted[0] = 1.0;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto d = synthesize_dataset(seed, 640, planted, ranges);
        ForestConfig cfg;
        cfg.trees = 50;
        cfg.seed = seed;
        const auto forest = train_forest(d, cfg);
        CHECK(argmax(gini_importance(forest).weights) == 0);
        CHECK(argmax(oob_importance(forest, d, {OobNoise::Permute, seed}).weights) == 0);
        CHECK(forest.oob_error(d) < 0.2);
    }
}

TEST_CASE("dataset text round trip") {
    const auto d = synthesize_dataset(4, 20, std::vector<double>{0.30, 0.20, 0.15, 0.10, 0.10, 0.10, 0.05},
                                      default_feature_ranges());
    const auto back = parse_dataset(dataset_to_text(d));
    CHECK(back.labels == d.labels);
    for (std::size_t i = 0; i < d.values.size(); ++i) CHECK(back.values[i] == doctest::Approx(d.values[i]).epsilon(1e-12));
    CHECK_THROWS_AS(parse_dataset("max_wind,label\n1,0\n"), Error);
}
