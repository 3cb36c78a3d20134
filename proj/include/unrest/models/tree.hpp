#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "unrest/models/matrix.hpp"

namespace unrest::models {

/// 1 - sum_c p_c^2 over binary labels.
inline double gini_impurity(std::span<const int> labels) {
    if (labels.empty()) throw EmptySet("gini impurity of an empty set");
    std::size_t ones = 0;
    for (int l : labels) ones += l != 0;
    const double p1 = static_cast<double>(ones) / static_cast<double>(labels.size());
    const double p0 = 1.0 - p1;
    return 1.0 - (p0 * p0 + p1 * p1);
}

namespace detail {
inline double gini_counts(std::size_t zeros, std::size_t ones) {
    const double n = static_cast<double>(zeros + ones);
    const double p0 = static_cast<double>(zeros) / n;
    const double p1 = static_cast<double>(ones) / n;
    return 1.0 - (p0 * p0 + p1 * p1);
}
} // namespace detail

struct TreeHyperparams {
    int max_depth = 12;
    int min_leaf = 2;
    int features_per_split = 0;  // 0 = every feature

    bool operator==(const TreeHyperparams&) const = default;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = 0;

    bool leaf() const noexcept { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

/// CART classification tree; rows with x[feature] <= threshold go left.
struct DecisionTree {
    std::size_t dims = 0;
    std::vector<TreeNode> nodes;

    int predict(std::span<const double> x) const {
        int at = 0;
        while (!nodes[at].leaf()) at = x[nodes[at].feature] <= nodes[at].threshold ? nodes[at].left : nodes[at].right;
        return nodes[at].label;
    }

    int depth() const {
        std::vector<std::pair<int, int>> stack{{0, 0}};
        int best = 0;
        while (!stack.empty()) {
            auto [n, d] = stack.back();
            stack.pop_back();
            best = std::max(best, d);
            if (!nodes[n].leaf()) {
                stack.push_back({nodes[n].left, d + 1});
                stack.push_back({nodes[n].right, d + 1});
            }
        }
        return best;
    }

    bool operator==(const DecisionTree&) const = default;
};

namespace detail {

class TreeBuilder {
public:
    TreeBuilder(const FeatureMatrix& data, const TreeHyperparams& hp, std::mt19937_64& rng)
        : data_(data), hp_(hp), rng_(rng) {
        fps_ = hp.features_per_split <= 0 ? data.d
                                          : std::min<std::size_t>(static_cast<std::size_t>(hp.features_per_split), data.d);
        all_features_.resize(data.d);
        std::iota(all_features_.begin(), all_features_.end(), 0);
    }

    DecisionTree build(std::vector<std::size_t> sample) {
        tree_.dims = data_.d;
        tree_.nodes.clear();
        grow(sample, 0);
        return std::move(tree_);
    }

private:
    struct Split {
        int feature = -1;
        double threshold = 0.0;
        double gain = 0.0;
    };

    int grow(std::vector<std::size_t>& idx, int depth) {
        std::size_t ones = 0;
        for (auto i : idx) ones += data_.labels[i] != 0;
        const std::size_t zeros = idx.size() - ones;
        const int node = static_cast<int>(tree_.nodes.size());
        tree_.nodes.push_back({});
        tree_.nodes[node].label = majority_label(zeros, ones);

        const auto min_leaf = static_cast<std::size_t>(std::max(1, hp_.min_leaf));
        if (depth >= hp_.max_depth || ones == 0 || zeros == 0 || idx.size() < 2 * min_leaf) return node;

        Split best = find_split(idx, zeros, ones, min_leaf);
        if (best.feature < 0) return node;

        std::vector<std::size_t> left, right;
        for (auto i : idx) (data_.at(i, best.feature) <= best.threshold ? left : right).push_back(i);
        idx.clear();
        idx.shrink_to_fit();

        tree_.nodes[node].feature = best.feature;
        tree_.nodes[node].threshold = best.threshold;
        int l = grow(left, depth + 1);
        int r = grow(right, depth + 1);
        tree_.nodes[node].left = l;
        tree_.nodes[node].right = r;
        return node;
    }

    std::vector<std::size_t> candidate_features() {
        if (fps_ >= data_.d) return all_features_;
        std::vector<std::size_t> pool = all_features_;
        for (std::size_t i = 0; i < fps_; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
            std::swap(pool[i], pool[pick(rng_)]);
        }
        pool.resize(fps_);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

    // Best Gini gain over the candidate features. Ties keep the lower feature
    // index and then the lower threshold.
    Split find_split(const std::vector<std::size_t>& idx, std::size_t zeros, std::size_t ones, std::size_t min_leaf) {
        const double parent = gini_counts(zeros, ones);
        const double n = static_cast<double>(idx.size());
        Split best;
        best.gain = 1e-12;
        std::vector<std::pair<double, int>> col(idx.size());
        for (std::size_t f : candidate_features()) {
            for (std::size_t k = 0; k < idx.size(); ++k) col[k] = {data_.at(idx[k], f), data_.labels[idx[k]]};
            std::sort(col.begin(), col.end());
            std::size_t l0 = 0, l1 = 0;
            for (std::size_t k = 1; k < col.size(); ++k) {
                (col[k - 1].second ? l1 : l0) += 1;
                if (!(col[k - 1].first < col[k].first)) continue;
                if (k < min_leaf || col.size() - k < min_leaf) continue;
                const std::size_t r0 = zeros - l0, r1 = ones - l1;
                const double child = (static_cast<double>(k) * gini_counts(l0, l1) +
                                      static_cast<double>(col.size() - k) * gini_counts(r0, r1)) / n;
                const double gain = parent - child;
                if (gain > best.gain) {
                    double mid = 0.5 * (col[k - 1].first + col[k].first);
                    if (!(mid < col[k].first)) mid = col[k - 1].first;
                    best = {static_cast<int>(f), mid, gain};
                }
            }
        }
        return best;
    }

    const FeatureMatrix& data_;
    TreeHyperparams hp_;
    std::mt19937_64& rng_;
    std::size_t fps_ = 0;
    std::vector<std::size_t> all_features_;
    DecisionTree tree_;
};

} // namespace detail

/// Grows a CART tree on the given sample (row indices, repeats allowed).
inline DecisionTree grow_tree(const FeatureMatrix& data, std::vector<std::size_t> sample, const TreeHyperparams& hp,
                              std::mt19937_64& rng) {
    if (sample.empty()) throw EmptyInput("cannot grow a tree on zero rows");
    detail::TreeBuilder builder(data, hp, rng);
    return builder.build(std::move(sample));
}

inline DecisionTree grow_tree(const FeatureMatrix& data, const TreeHyperparams& hp, std::uint64_t seed) {
    std::vector<std::size_t> all(data.n);
    std::iota(all.begin(), all.end(), 0);
    std::mt19937_64 rng(seed);
    return grow_tree(data, std::move(all), hp, rng);
}

} // namespace unrest::models
