#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "unrest/labeling/labeling.hpp"
#include "unrest/models/matrix.hpp"

namespace unrest::models {

/// Which interval columns enter the classifier.
enum class FeatureSet {
    /// Baseline level, daily lags, tone, Goldstein and month. The
    /// interval's own mct, mct_bar_comp and theta are left out because the
    /// label is a function of exactly those three.
    history,
    /// Every numeric column of the interval row.
    full,
};

inline std::vector<std::string> design_columns(std::size_t lags, FeatureSet set) {
    std::vector<std::string> cols;
    if (set == FeatureSet::full) cols = {"mct", "mct_bar", "mct_bar_comp", "theta"};
    else cols = {"mct_bar"};
    for (std::size_t j = 1; j <= lags; ++j) cols.push_back("lag_" + std::to_string(j));
    cols.push_back("mean_tone");
    cols.push_back("mean_goldstein");
    cols.push_back("month");
    return cols;
}

/// Maps a labeled dataset onto a design matrix; absent tone/Goldstein
/// become NaN for the preprocessor to impute.
inline FeatureMatrix design_matrix(const labeling::LabeledDataset& ds, FeatureSet set = FeatureSet::history,
                                   std::size_t lags = std::numeric_limits<std::size_t>::max()) {
    if (lags == std::numeric_limits<std::size_t>::max()) lags = ds.lag_count();
    auto names = design_columns(lags, set);
    FeatureMatrix m(ds.size(), names.size());
    m.column_names = std::move(names);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto& f = ds.rows[i].features;
        if (f.lags.size() != lags) throw DimensionMismatch("row carries " + std::to_string(f.lags.size()) + " lags");
        auto row = m.row(i);
        std::size_t j = 0;
        if (set == FeatureSet::full) {
            row[j++] = f.mct;
            row[j++] = f.mct_bar;
            row[j++] = f.mct_bar_comp;
            row[j++] = f.theta;
        } else {
            row[j++] = f.mct_bar;
        }
        for (double v : f.lags) row[j++] = v;
        row[j++] = f.mean_tone.value_or(nan);
        row[j++] = f.mean_goldstein.value_or(nan);
        row[j++] = f.month;
        m.labels[i] = ds.rows[i].label;
    }
    return m;
}

} // namespace unrest::models
