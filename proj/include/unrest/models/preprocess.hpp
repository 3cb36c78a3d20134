#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "unrest/models/matrix.hpp"

namespace unrest::models {

inline constexpr double kStdFloor = 1e-9;

/// Column-wise median imputation followed by standardization, with every
/// statistic taken from the training rows only.
struct Preprocessor {
    std::vector<double> medians;
    std::vector<double> means;
    std::vector<double> stds;

    bool identity() const noexcept { return means.empty(); }
    std::size_t dims() const noexcept { return means.size(); }

    static Preprocessor fit(const FeatureMatrix& train) {
        if (train.n == 0) throw EmptyInput("cannot fit preprocessing on an empty matrix");
        Preprocessor p;
        p.medians.assign(train.d, 0.0);
        p.means.assign(train.d, 0.0);
        p.stds.assign(train.d, 1.0);
        std::vector<double> col;
        col.reserve(train.n);
        for (std::size_t j = 0; j < train.d; ++j) {
            col.clear();
            for (std::size_t i = 0; i < train.n; ++i)
                if (double v = train.at(i, j); !std::isnan(v)) col.push_back(v);
            double median = 0.0;
            if (!col.empty()) {
                std::sort(col.begin(), col.end());
                std::size_t m = col.size() / 2;
                median = col.size() % 2 ? col[m] : 0.5 * (col[m - 1] + col[m]);
            }
            p.medians[j] = median;
            double sum = 0.0;
            for (std::size_t i = 0; i < train.n; ++i) {
                double v = train.at(i, j);
                sum += std::isnan(v) ? median : v;
            }
            const double mean = sum / static_cast<double>(train.n);
            double ss = 0.0;
            for (std::size_t i = 0; i < train.n; ++i) {
                double v = train.at(i, j);
                double dv = (std::isnan(v) ? median : v) - mean;
                ss += dv * dv;
            }
            p.means[j] = mean;
            p.stds[j] = std::max(std::sqrt(ss / static_cast<double>(train.n)), kStdFloor);
        }
        return p;
    }

    void apply_row(std::span<double> row) const {
        if (identity()) return;
        if (row.size() != dims()) throw DimensionMismatch("row has " + std::to_string(row.size()) +
                                                          " columns, expected " + std::to_string(dims()));
        for (std::size_t j = 0; j < row.size(); ++j) {
            double v = std::isnan(row[j]) ? medians[j] : row[j];
            row[j] = (v - means[j]) / stds[j];
        }
    }

    FeatureMatrix transform(FeatureMatrix m) const {
        if (identity()) return m;
        if (m.d != dims()) throw DimensionMismatch("matrix has " + std::to_string(m.d) + " columns, expected " +
                                                   std::to_string(dims()));
        for (std::size_t i = 0; i < m.n; ++i) apply_row(m.row(i));
        return m;
    }

    bool operator==(const Preprocessor&) const = default;
};

/// Standardizes `apply_to` with statistics fitted on `train`.
inline FeatureMatrix standardize(const FeatureMatrix& train, FeatureMatrix apply_to) {
    return Preprocessor::fit(train).transform(std::move(apply_to));
}

} // namespace unrest::models
