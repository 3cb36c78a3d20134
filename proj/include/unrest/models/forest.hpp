#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "unrest/core/parallel.hpp"
#include "unrest/models/tree.hpp"

namespace unrest::models {

struct ForestHyperparams {
    int n_trees = 100;
    int max_depth = 12;
    int min_leaf = 2;
    int features_per_split = 0;  // 0 = ceil(sqrt(d))
    bool bootstrap = true;

    int resolved_features(std::size_t d) const {
        if (features_per_split > 0) return std::min(features_per_split, static_cast<int>(d));
        return std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d)))));
    }

    bool operator==(const ForestHyperparams&) const = default;
};

/// splitmix64 finalizer; decorrelates (seed, index) pairs.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

struct RandomForest {
    std::vector<DecisionTree> trees;

    /// Majority vote; a tie predicts 0.
    int predict(std::span<const double> x) const {
        std::size_t ones = 0;
        for (const auto& t : trees) ones += t.predict(x) != 0;
        return majority_label(trees.size() - ones, ones);
    }

    bool operator==(const RandomForest&) const = default;
};

/// Each tree draws its own bootstrap sample and split features from a seed
/// derived from (seed, tree index), so the result does not depend on `jobs`.
inline RandomForest grow_forest(const FeatureMatrix& data, const ForestHyperparams& hp, std::uint64_t seed,
                                std::size_t jobs = 1) {
    if (hp.n_trees < 1) throw InvalidValue("n_trees must be >= 1");
    if (data.n == 0) throw EmptyInput("cannot fit a forest on zero rows");
    TreeHyperparams thp{hp.max_depth, hp.min_leaf, hp.resolved_features(data.d)};
    RandomForest forest;
    forest.trees.resize(static_cast<std::size_t>(hp.n_trees));
    parallel_for(forest.trees.size(), jobs, [&](std::size_t t) {
        std::mt19937_64 rng(derive_seed(seed, t));
        std::vector<std::size_t> sample(data.n);
        if (hp.bootstrap) {
            std::uniform_int_distribution<std::size_t> pick(0, data.n - 1);
            for (auto& s : sample) s = pick(rng);
        } else {
            std::iota(sample.begin(), sample.end(), 0);
        }
        forest.trees[t] = grow_tree(data, std::move(sample), thp, rng);
    });
    return forest;
}

} // namespace unrest::models
