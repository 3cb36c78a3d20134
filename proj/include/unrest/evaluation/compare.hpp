#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "unrest/evaluation/metrics.hpp"
#include "unrest/labeling/labeling.hpp"
#include "unrest/models/design.hpp"
#include "unrest/models/model.hpp"

namespace unrest::evaluation {

using models::ModelKind;

struct ComparisonRow {
    ModelKind kind = ModelKind::forest;
    double accuracy = 0;
    double mae = 0;
    std::vector<std::string> warnings;
};

/// Rows sorted by accuracy, best first; equal accuracies in kind-name order.
struct ComparisonTable {
    std::vector<ComparisonRow> rows;

    void sort() {
        std::stable_sort(rows.begin(), rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
            if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
            return to_string(a.kind) < to_string(b.kind);
        });
    }

    const ComparisonRow* find(ModelKind k) const {
        for (const auto& r : rows)
            if (r.kind == k) return &r;
        return nullptr;
    }
};

struct CompareOptions {
    models::Hyperparams hyper;
    models::FeatureSet feature_set = models::FeatureSet::history;
    std::size_t jobs = 1;
};

namespace detail {
inline void check_disjoint(const labeling::LabeledDataset& train, const labeling::LabeledDataset& test) {
    std::set<std::int32_t> ends;
    for (const auto& r : train.rows) ends.insert(r.features.end_date.serial());
    for (const auto& r : test.rows)
        if (ends.contains(r.features.end_date.serial()))
            throw InvalidValue("train and test share the interval ending " + r.features.end_date.iso());
}
} // namespace detail

/// Fits every kind with the shared seed on `train` and scores it on `test`.
inline ComparisonTable compare_classifiers(const labeling::LabeledDataset& train, const labeling::LabeledDataset& test,
                                           const std::vector<ModelKind>& kinds, std::uint64_t seed,
                                           const CompareOptions& opts = {}) {
    if (train.empty() || test.empty()) throw EmptyInput("comparison needs non-empty train and test sets");
    detail::check_disjoint(train, test);
    const auto xtrain = models::design_matrix(train, opts.feature_set);
    const auto xtest = models::design_matrix(test, opts.feature_set, train.lag_count());
    ComparisonTable table;
    for (auto kind : kinds) {
        auto model = models::fit_model(kind, xtrain, opts.hyper, seed, {.preprocess = true, .jobs = opts.jobs});
        auto pred = models::predict(model, xtest);
        table.rows.push_back({kind, accuracy(pred, xtest.labels), mean_absolute_error(pred, xtest.labels),
                              model.warnings});
    }
    table.sort();
    return table;
}

enum class EvalMode { standard, lookahead };

struct EvalEntry {
    ModelKind kind = ModelKind::forest;
    BinaryScores scores;
};

struct EvalReport {
    std::string country;
    std::vector<EvalEntry> entries;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    labeling::SplitSpec split;
    std::uint64_t seed = 0;
    EvalMode mode = EvalMode::standard;
    int horizon = 0;
};

} // namespace unrest::evaluation
