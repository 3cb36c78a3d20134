#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "unrest/models/matrix.hpp"

namespace unrest::models {

/// k-nearest neighbours, Euclidean metric. Equal distances rank the earlier
/// training row first; a split vote predicts 0.
struct Knn {
    int k = 5;
    FeatureMatrix train;

    int predict(std::span<const double> x) const {
        std::vector<std::pair<double, std::size_t>> dist(train.n);
        for (std::size_t i = 0; i < train.n; ++i) {
            double s = 0.0;
            auto r = train.row(i);
            for (std::size_t j = 0; j < x.size(); ++j) {
                const double dv = r[j] - x[j];
                s += dv * dv;
            }
            dist[i] = {s, i};
        }
        const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, k)), train.n);
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
        std::size_t ones = 0;
        for (std::size_t i = 0; i < kk; ++i) ones += train.labels[dist[i].second] != 0;
        return majority_label(kk - ones, ones);
    }

    bool operator==(const Knn& o) const {
        return k == o.k && train.n == o.train.n && train.d == o.train.d && train.values == o.train.values &&
               train.labels == o.train.labels;
    }
};

inline Knn fit_knn(const FeatureMatrix& data, int k) {
    if (data.n == 0) throw EmptyInput("cannot fit KNN on zero rows");
    if (k < 1) throw InvalidValue("knn k must be >= 1");
    Knn m;
    m.k = k;
    m.train = data;
    m.train.column_names.clear();
    return m;
}

} // namespace unrest::models
