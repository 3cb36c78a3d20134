#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "unrest/core/error.hpp"
#include "unrest/features/config.hpp"
#include "unrest/features/feature_csv.hpp"
#include "unrest/features/intervals.hpp"

namespace unrest::labeling {

using features::IntervalFeatureRow;
using features::LabelStat;

struct LabeledRow {
    IntervalFeatureRow features;
    int label = 0;  // 1 = unrest

    bool operator==(const LabeledRow&) const = default;
};

struct LabeledDataset {
    static constexpr int kSchemaVersion = 1;

    std::string country;
    std::vector<LabeledRow> rows;
    int schema_version = kSchemaVersion;

    std::size_t size() const noexcept { return rows.size(); }
    bool empty() const noexcept { return rows.empty(); }
    std::size_t lag_count() const { return rows.empty() ? 0 : rows.front().features.lags.size(); }

    bool operator==(const LabeledDataset&) const = default;
};

/// 1 iff the chosen statistic strictly exceeds delta.
inline int label_interval(const IntervalFeatureRow& row, double delta, LabelStat stat = LabelStat::margin) {
    const double s = stat == LabelStat::margin ? row.mct - row.theta : row.mct_bar_comp;
    return s > delta ? 1 : 0;
}

inline LabeledDataset assemble_dataset(const std::vector<IntervalFeatureRow>& rows, double delta,
                                       std::string country = {}, LabelStat stat = LabelStat::margin) {
    LabeledDataset ds;
    ds.country = std::move(country);
    ds.rows.reserve(rows.size());
    for (const auto& r : rows) ds.rows.push_back({r, label_interval(r, delta, stat)});
    return ds;
}

inline std::vector<int> labels_of(const LabeledDataset& ds) {
    std::vector<int> out;
    out.reserve(ds.size());
    for (const auto& r : ds.rows) out.push_back(r.label);
    return out;
}

inline std::string write_labeled_csv(const LabeledDataset& ds) {
    const std::size_t lags = ds.lag_count();
    std::string out = features::feature_csv_header(lags) + ",label\n";
    for (const auto& r : ds.rows) {
        if (r.features.lags.size() != lags) throw DimensionMismatch("inconsistent lag count");
        features::append_feature_fields(out, r.features);
        out += ',';
        out += r.label ? '1' : '0';
        out += '\n';
    }
    return out;
}

/// Inverse of write_labeled_csv. An empty dataset is written with zero lag
/// columns, so the lag count is taken from the header.
inline LabeledDataset read_labeled_csv(std::string_view text, std::string country = {}) {
    LabeledDataset ds;
    ds.country = std::move(country);
    int lags = -1;
    bool header = true;
    for_each_line(text, [&](std::string_view line) {
        if (header) {
            header = false;
            lags = features::lag_count_from_header(line, "label");
            if (lags < 0) throw FormatError("not a labeled CSV header");
            return;
        }
        if (line.empty()) return;
        auto cols = split(line, ',');
        if (cols.size() != static_cast<std::size_t>(11 + lags)) throw FormatError("wrong column count");
        LabeledRow r;
        r.features = features::parse_feature_fields(cols, static_cast<std::size_t>(lags));
        if (cols.back() == "1") r.label = 1;
        else if (cols.back() == "0") r.label = 0;
        else throw FormatError("label must be 0 or 1");
        ds.rows.push_back(std::move(r));
    });
    if (header) throw FormatError("empty labeled CSV");
    return ds;
}

/// Year-based train/test split on each row's end date.
struct SplitSpec {
    std::set<int> train_years{2015, 2016, 2017, 2018};
    std::set<int> test_years{2019};
    std::set<int> discard_years{2020, 2021};

    void validate() const {
        for (int y : train_years)
            if (test_years.contains(y) || discard_years.contains(y))
                throw InvalidValue("split year sets overlap at " + std::to_string(y));
        for (int y : test_years)
            if (discard_years.contains(y)) throw InvalidValue("split year sets overlap at " + std::to_string(y));
    }
};

struct SplitResult {
    LabeledDataset train;
    LabeledDataset test;
    std::size_t discarded = 0;     // rows in a discard year
    std::size_t out_of_range = 0;  // rows in no listed year
    std::vector<std::string> warnings;
};

inline SplitResult split_by_year(const LabeledDataset& ds, const SplitSpec& spec) {
    spec.validate();
    SplitResult out;
    out.train.country = out.test.country = ds.country;
    for (const auto& r : ds.rows) {
        int y = r.features.end_date.year();
        if (spec.train_years.contains(y)) out.train.rows.push_back(r);
        else if (spec.test_years.contains(y)) out.test.rows.push_back(r);
        else if (spec.discard_years.contains(y)) ++out.discarded;
        else ++out.out_of_range;
    }
    if (out.train.empty()) out.warnings.push_back("EmptySplit: no training rows");
    if (out.test.empty()) out.warnings.push_back("EmptySplit: no test rows");
    return out;
}

} // namespace unrest::labeling
