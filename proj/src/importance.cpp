#include "stormgrid/importance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "stormgrid/error.hpp"
#include "stormgrid/text_io.hpp"

namespace stormgrid {

void Dataset::validate() const {
    if (feature_names.empty()) throw Error(ErrorKind::InvalidArgument, "dataset has no features");
    if (values.size() != rows() * features())
        throw Error(ErrorKind::DimensionMismatch, "dataset values do not match rows x features");
    if (rows() < 2) throw Error(ErrorKind::InvalidArgument, "dataset needs at least two rows");
    for (double v : values)
        if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "dataset contains a non-finite value");
    for (int l : labels)
        if (l != 0 && l != 1) throw Error(ErrorKind::InvalidArgument, "labels must be 0 or 1");
}

Dataset parse_dataset(std::string_view text, std::string source) {
    const auto table = parse_table(text, source);
    Dataset data;
    data.provenance = "file:" + source;
    data.feature_names = canonical_feature_order();
    std::vector<std::size_t> columns;
    for (const auto& name : data.feature_names) columns.push_back(table.column(name));
    const auto label = table.column("label");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto at = source + ":" + std::to_string(table.line_numbers[r]);
        for (auto c : columns) data.values.push_back(parse_number(table.rows[r][c], at));
        data.labels.push_back(parse_int(table.rows[r][label], at));
    }
    data.validate();
    return data;
}

Dataset load_dataset(const std::filesystem::path& path) { return parse_dataset(read_file(path), path.string()); }

std::string dataset_to_text(const Dataset& data) {
    std::ostringstream out;
    for (const auto& name : data.feature_names) out << name << ',';
    out << "label\n";
    for (std::size_t r = 0; r < data.rows(); ++r) {
        for (double v : data.row(r)) out << format_number(v) << ',';
        out << data.labels[r] << '\n';
    }
    return out.str();
}

double WeightScheme::weight_of(std::string_view feature) const {
    for (std::size_t i = 0; i < features.size(); ++i)
        if (features[i] == feature) return weights[i];
    throw Error(ErrorKind::UnknownFeature, "scheme " + name + " has no feature '" + std::string(feature) + "'");
}

// --- random forest ----------------------------------------------------------

double gini_impurity(std::size_t class0, std::size_t class1) {
    const double n = static_cast<double>(class0 + class1);
    if (n == 0.0) return 0.0;
    const double p0 = class0 / n;
    const double p1 = class1 / n;
    return 1.0 - p0 * p0 - p1 * p1;
}

int DecisionTree::predict(std::span<const double> row) const {
    int node = 0;
    while (!nodes[node].leaf()) {
        const auto& n = nodes[node];
        node = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[node].prediction;
}

int Forest::predict(std::span<const double> row) const {
    std::size_t votes = 0;
    for (const auto& t : trees) votes += static_cast<std::size_t>(t.predict(row));
    return 2 * votes > trees.size() ? 1 : 0;
}

double Forest::oob_error(const Dataset& data) const {
    std::vector<std::array<std::size_t, 2>> votes(data.rows());
    for (const auto& t : trees)
        for (auto r : t.out_of_bag) ++votes[r][static_cast<std::size_t>(t.predict(data.row(r)))];
    std::size_t counted = 0;
    std::size_t wrong = 0;
    for (std::size_t r = 0; r < data.rows(); ++r) {
        if (votes[r][0] + votes[r][1] == 0) continue;
        ++counted;
        const int vote = votes[r][1] > votes[r][0] ? 1 : 0;
        if (vote != data.labels[r]) ++wrong;
    }
    return counted ? static_cast<double>(wrong) / counted : 0.0;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b * 0x632BE59BD9B4E019ULL));
}

std::size_t draw_index(std::mt19937_64& rng, std::size_t n) {
    __extension__ using u128 = unsigned __int128;
    return static_cast<std::size_t>((static_cast<u128>(rng()) * n) >> 64);
}

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double decrease = 0.0;  // parent n*gini minus children n*gini
};

class TreeBuilder {
public:
    TreeBuilder(const Dataset& data, const ForestConfig& config, std::mt19937_64& rng)
        : data_(data), config_(config), rng_(rng) {
        mtry_ = config.features_per_split > 0
                    ? std::min<std::size_t>(static_cast<std::size_t>(config.features_per_split), data.features())
                    : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(data.features()))));
    }

    std::vector<TreeNode> build(std::vector<std::size_t> samples) {
        nodes_.clear();
        grow(std::move(samples), 0);
        return std::move(nodes_);
    }

private:
    int grow(std::vector<std::size_t> samples, int depth) {
        TreeNode node;
        for (auto s : samples) ++node.class_counts[static_cast<std::size_t>(data_.labels[s])];
        node.gini = gini_impurity(node.class_counts[0], node.class_counts[1]);
        node.prediction = node.class_counts[1] > node.class_counts[0] ? 1 : 0;
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back(node);

        const bool depth_ok = config_.max_depth <= 0 || depth < config_.max_depth;
        const auto min_leaf = static_cast<std::size_t>(std::max(1, config_.min_leaf));
        if (node.gini == 0.0 || !depth_ok || samples.size() < 2 * min_leaf) return id;

        const auto split = best_split(samples, node, min_leaf);
        if (split.feature < 0) return id;

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (auto s : samples)
            (data_.at(s, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right).push_back(s);
        samples.clear();
        samples.shrink_to_fit();
        nodes_[static_cast<std::size_t>(id)].feature = split.feature;
        nodes_[static_cast<std::size_t>(id)].threshold = split.threshold;
        const int l = grow(std::move(left), depth + 1);
        const int r = grow(std::move(right), depth + 1);
        nodes_[static_cast<std::size_t>(id)].left = l;
        nodes_[static_cast<std::size_t>(id)].right = r;
        return id;
    }

    Split best_split(const std::vector<std::size_t>& samples, const TreeNode& node, std::size_t min_leaf) {
        std::vector<std::size_t> order(data_.features());
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = 0; i + 1 < order.size(); ++i)
            std::swap(order[i], order[i + draw_index(rng_, order.size() - i)]);

        Split best;
        // Try the random subset first; fall through to the remaining
        // features only if none of them yields an impurity decrease.
        for (std::size_t k = 0; k < order.size(); ++k) {
            if (k >= mtry_ && best.feature >= 0) break;
            const auto candidate = scan_feature(samples, order[k], node, min_leaf);
            if (candidate.decrease > best.decrease + 1e-12 ||
                (best.feature < 0 && candidate.feature >= 0))
                best = candidate;
        }
        return best;
    }

    Split scan_feature(const std::vector<std::size_t>& samples, std::size_t f, const TreeNode& node,
                       std::size_t min_leaf) const {
        std::vector<std::pair<double, int>> column;
        column.reserve(samples.size());
        for (auto s : samples) column.emplace_back(data_.at(s, f), data_.labels[s]);
        std::sort(column.begin(), column.end());
        const double n = static_cast<double>(samples.size());
        const double parent = n * node.gini;
        std::array<std::size_t, 2> left{};
        Split best;
        for (std::size_t i = 0; i + 1 < column.size(); ++i) {
            ++left[static_cast<std::size_t>(column[i].second)];
            if (column[i].first == column[i + 1].first) continue;
            const std::size_t nl = i + 1;
            const std::size_t nr = column.size() - nl;
            if (nl < min_leaf || nr < min_leaf) continue;
            const std::array<std::size_t, 2> right{node.class_counts[0] - left[0], node.class_counts[1] - left[1]};
            const double children = static_cast<double>(nl) * gini_impurity(left[0], left[1]) +
                                    static_cast<double>(nr) * gini_impurity(right[0], right[1]);
            const double decrease = parent - children;
            if (decrease > 1e-12 && decrease > best.decrease) {
                best.feature = static_cast<int>(f);
                best.threshold = 0.5 * (column[i].first + column[i + 1].first);
                best.decrease = decrease;
            }
        }
        return best;
    }

    const Dataset& data_;
    const ForestConfig& config_;
    std::mt19937_64& rng_;
    std::size_t mtry_ = 1;
    std::vector<TreeNode> nodes_;
};

}  // namespace

Forest train_forest(const Dataset& data, const ForestConfig& config) {
    data.validate();
    if (config.trees < 1) throw Error(ErrorKind::InvalidArgument, "forest needs at least one tree");
    const auto positives = static_cast<std::size_t>(std::count(data.labels.begin(), data.labels.end(), 1));
    if (positives == 0 || positives == data.rows())
        throw Error(ErrorKind::SingleClassDataset, "both fault and no-fault rows are required");

    Forest forest;
    forest.feature_count = data.features();
    forest.feature_names = data.feature_names;
    const std::size_t n = data.rows();
    for (int t = 0; t < config.trees; ++t) {
        std::mt19937_64 rng(derive_seed(config.seed, static_cast<std::uint64_t>(t)));
        DecisionTree tree;
        std::vector<char> in_bag(n, 0);
        tree.bootstrap.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = draw_index(rng, n);
            tree.bootstrap.push_back(r);
            in_bag[r] = 1;
        }
        for (std::size_t r = 0; r < n; ++r)
            if (!in_bag[r]) tree.out_of_bag.push_back(r);
        TreeBuilder builder(data, config, rng);
        tree.nodes = builder.build(tree.bootstrap);
        forest.trees.push_back(std::move(tree));
    }
    return forest;
}

namespace {

WeightScheme normalized_scheme(std::string name, std::vector<std::string> features, std::vector<double> raw) {
    double sum = 0.0;
    for (double& v : raw) {
        v = std::max(0.0, v);
        sum += v;
    }
    if (!(sum > 0.0)) throw Error(ErrorKind::DegenerateImportance, name + ": every importance is zero");
    for (double& v : raw) v /= sum;
    return {std::move(name), std::move(features), std::move(raw)};
}

}  // namespace

WeightScheme gini_importance(const Forest& forest) {
    std::vector<double> total(forest.feature_count, 0.0);
    for (const auto& tree : forest.trees) {
        const double root = static_cast<double>(tree.nodes.front().samples());
        for (const auto& node : tree.nodes) {
            if (node.leaf()) continue;
            const auto& l = tree.nodes[static_cast<std::size_t>(node.left)];
            const auto& r = tree.nodes[static_cast<std::size_t>(node.right)];
            const double vim = (static_cast<double>(node.samples()) * node.gini -
                                static_cast<double>(l.samples()) * l.gini -
                                static_cast<double>(r.samples()) * r.gini) /
                               root;
            total[static_cast<std::size_t>(node.feature)] += vim;
        }
    }
    for (double& v : total) v /= static_cast<double>(forest.trees.size());
    return normalized_scheme("gini", forest.feature_names, std::move(total));
}

std::vector<double> oob_raw_importance(const Forest& forest, const Dataset& data, const OobOptions& options) {
    const std::size_t m = forest.feature_count;
    if (data.features() != m) throw Error(ErrorKind::DimensionMismatch, "dataset does not match the forest");
    std::vector<double> total(m, 0.0);
    std::vector<double> scratch(m);
    for (std::size_t t = 0; t < forest.trees.size(); ++t) {
        const auto& tree = forest.trees[t];
        const auto& oob = tree.out_of_bag;
        if (oob.empty())
            throw Error(ErrorKind::EmptyOutOfBag, "tree " + std::to_string(t) + " has no out-of-bag rows");
        auto error_with = [&](std::size_t feature, const std::vector<double>* replacement) {
            std::size_t wrong = 0;
            for (std::size_t i = 0; i < oob.size(); ++i) {
                const auto row = data.row(oob[i]);
                std::copy(row.begin(), row.end(), scratch.begin());
                if (replacement) scratch[feature] = (*replacement)[i];
                if (tree.predict(scratch) != data.labels[oob[i]]) ++wrong;
            }
            return static_cast<double>(wrong) / static_cast<double>(oob.size());
        };
        const double baseline = error_with(0, nullptr);
        for (std::size_t j = 0; j < m; ++j) {
            std::vector<double> column;
            column.reserve(oob.size());
            for (auto r : oob) column.push_back(data.at(r, j));
            std::mt19937_64 rng(derive_seed(options.seed, t + 1, j + 1));
            if (!options.identity_permutation) {
                if (options.noise == OobNoise::Permute) {
                    for (std::size_t i = column.size(); i > 1; --i) std::swap(column[i - 1], column[draw_index(rng, i)]);
                } else {
                    const double mean = std::accumulate(column.begin(), column.end(), 0.0) / column.size();
                    double var = 0.0;
                    for (double v : column) var += (v - mean) * (v - mean);
                    const double sd = std::sqrt(var / column.size());
                    std::normal_distribution<double> noise(0.0, sd > 0.0 ? sd : 1.0);
                    for (double& v : column) v += noise(rng);
                }
            }
            total[j] += error_with(j, &column) - baseline;
        }
    }
    for (double& v : total) v /= static_cast<double>(forest.trees.size());
    return total;
}

WeightScheme oob_importance(const Forest& forest, const Dataset& data, const OobOptions& options) {
    return normalized_scheme("oob", forest.feature_names, oob_raw_importance(forest, data, options));
}

WeightScheme entropy_weights(std::span<const double> values, std::size_t rows, std::size_t cols,
                             std::span<const Sign> signs) {
    if (rows < 2) throw Error(ErrorKind::InvalidArgument, "entropy weights need at least two rows");
    if (values.size() != rows * cols || signs.size() != cols)
        throw Error(ErrorKind::DimensionMismatch, "entropy weights: matrix shape mismatch");
    const double k = 1.0 / std::log(static_cast<double>(rows));
    std::vector<double> divergence(cols, 0.0);
    for (std::size_t j = 0; j < cols; ++j) {
        double lo = values[j];
        double hi = values[j];
        for (std::size_t i = 0; i < rows; ++i) {
            lo = std::min(lo, values[i * cols + j]);
            hi = std::max(hi, values[i * cols + j]);
        }
        if (!(hi > lo)) continue;  // constant column: entropy 1
        std::vector<double> x(rows);
        double sum = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
            const double v = values[i * cols + j];
            x[i] = signs[j] == Sign::Negative ? (hi - v) / (hi - lo) : (v - lo) / (hi - lo);
            sum += x[i];
        }
        double e = 0.0;
        for (double xi : x) {
            if (xi <= 0.0) continue;
            const double p = xi / sum;
            e -= p * std::log(p);
        }
        divergence[j] = 1.0 - k * e;
    }
    const double total = std::accumulate(divergence.begin(), divergence.end(), 0.0);
    if (!(total > 0.0)) throw Error(ErrorKind::AllColumnsConstant, "no column carries information");
    std::vector<std::string> names;
    for (std::size_t j = 0; j < cols; ++j) names.push_back("x" + std::to_string(j));
    for (double& d : divergence) d /= total;
    return {"entropy", std::move(names), std::move(divergence)};
}

WeightScheme entropy_weights(const Dataset& data, std::span<const FeatureRange> ranges) {
    data.validate();
    if (ranges.size() != data.features())
        throw Error(ErrorKind::DimensionMismatch, "entropy weights: one range per feature required");
    std::vector<Sign> signs;
    for (const auto& r : ranges) signs.push_back(r.sign);
    auto scheme = entropy_weights(data.values, data.rows(), data.features(), signs);
    scheme.features = data.feature_names;
    return scheme;
}

Dataset synthesize_dataset(std::uint64_t seed, std::size_t size, std::span<const double> planted_weights,
                           std::span<const FeatureRange> ranges, double sharpness) {
    if (size < 10) throw Error(ErrorKind::InvalidArgument, "synthetic dataset needs at least 10 rows");
    if (planted_weights.size() != ranges.size())
        throw Error(ErrorKind::DimensionMismatch, "one planted weight per feature range required");
    const double wsum = std::accumulate(planted_weights.begin(), planted_weights.end(), 0.0);
    if (std::abs(wsum - 1.0) > 1e-9) throw Error(ErrorKind::InvalidArgument, "planted weights must sum to 1");

    const std::size_t m = ranges.size();
    std::mt19937_64 rng(derive_seed(seed, 0x5EED));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Dataset data;
    data.provenance = "synthetic(" + std::to_string(seed) + ")";
    data.feature_names = m == kFeatureCount ? canonical_feature_order() : std::vector<std::string>{};
    for (std::size_t j = data.feature_names.size(); j < m; ++j) data.feature_names.push_back("x" + std::to_string(j));
    std::vector<double> score(size, 0.0);
    std::vector<double> draw(size);
    data.values.resize(size * m);
    for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double v = ranges[j].min + unit(rng) * (ranges[j].max - ranges[j].min);
            data.values[i * m + j] = v;
            score[i] += planted_weights[j] * normalize(v, ranges[j]);
        }
        draw[i] = unit(rng);
    }
    auto faults = [&](double offset) {
        std::size_t count = 0;
        for (std::size_t i = 0; i < size; ++i)
            if (draw[i] < 1.0 / (1.0 + std::exp(-sharpness * (score[i] - offset)))) ++count;
        return count;
    };
    const std::size_t target = size / 2;
    double lo = -2.0;  // faults(lo) >= target
    double hi = 3.0;   // faults(hi) < target
    for (int it = 0; it < 200 && faults(lo) != target; ++it) {
        const double mid = 0.5 * (lo + hi);
        (faults(mid) >= target ? lo : hi) = mid;
    }
    data.labels.resize(size);
    for (std::size_t i = 0; i < size; ++i)
        data.labels[i] = draw[i] < 1.0 / (1.0 + std::exp(-sharpness * (score[i] - lo))) ? 1 : 0;
    return data;
}

}  // namespace stormgrid
