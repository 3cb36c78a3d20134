#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "unrest/core/error.hpp"

namespace unrest::models {

/// Dense row-major n x d design matrix with binary labels. Absent values are
/// NaN until a Preprocessor imputes them.
struct FeatureMatrix {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> values;
    std::vector<int> labels;
    std::vector<std::string> column_names;

    FeatureMatrix() = default;
    FeatureMatrix(std::size_t rows, std::size_t cols) : n(rows), d(cols), values(rows * cols, 0.0), labels(rows, 0) {}

    /// Builds from row vectors; every row must have the same width.
    static FeatureMatrix from_rows(const std::vector<std::vector<double>>& rows, std::vector<int> labels = {}) {
        FeatureMatrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.d) throw DimensionMismatch("ragged rows");
            std::copy(rows[i].begin(), rows[i].end(), m.values.begin() + static_cast<std::ptrdiff_t>(i * m.d));
        }
        if (!labels.empty()) {
            if (labels.size() != m.n) throw LengthMismatch("labels vs rows");
            m.labels = std::move(labels);
        }
        return m;
    }

    std::span<const double> row(std::size_t i) const { return {values.data() + i * d, d}; }
    std::span<double> row(std::size_t i) { return {values.data() + i * d, d}; }
    double at(std::size_t i, std::size_t j) const { return values[i * d + j]; }
    double& at(std::size_t i, std::size_t j) { return values[i * d + j]; }

    bool single_class() const {
        for (std::size_t i = 1; i < n; ++i)
            if (labels[i] != labels[0]) return false;
        return true;
    }

    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

inline int majority_label(std::size_t zeros, std::size_t ones) { return ones > zeros ? 1 : 0; }

} // namespace unrest::models
