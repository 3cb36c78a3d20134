#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "unrest/core/date.hpp"
#include "unrest/features/config.hpp"
#include "unrest/features/daily_series.hpp"
#include "unrest/features/rolling.hpp"

namespace unrest::features {

struct Interval {
    std::size_t start = 0;  // index into the daily series
    std::size_t end = 0;    // inclusive
    Date start_date;
    Date end_date;
};

/// Consecutive non-overlapping k-day windows tiling the post-warm-up part of
/// the series. A trailing partial window is dropped.
inline std::vector<Interval> make_intervals(const DailySeries& s, const FeatureConfig& cfg) {
    std::vector<Interval> out;
    const auto k = static_cast<std::size_t>(cfg.interval);
    const auto skip = static_cast<std::size_t>(cfg.warm_up());
    if (s.size() <= skip) return out;
    for (std::size_t start = skip; start + k <= s.size(); start += k)
        out.push_back({start, start + k - 1, s.date_at(start), s.date_at(start + k - 1)});
    return out;
}

/// -(MCT / MCTBar); 0 when the baseline is 0.
inline double mct_bar_comp(double mct, double mct_bar) {
    if (mct_bar == 0.0) return 0.0;
    double r = -(mct / mct_bar);
    return r == 0.0 ? 0.0 : r;
}

/// Unrest threshold: MCTBarComp + z * |MCTBar - MCTBarComp|.
inline double theta(double mct_bar, double comp, double z) { return comp + z * std::abs(mct_bar - comp); }

struct IntervalFeatureRow {
    int interval_index = 0;
    Date start_date;
    Date end_date;
    double mct = 0;          // mean daily count over the interval
    double mct_bar = 0;      // trailing W-day mean at end_date
    double mct_bar_comp = 0;
    double theta = 0;
    std::vector<double> lags;  // lags[j] = count at end_date - (j + 1)
    std::optional<double> mean_tone;
    std::optional<double> mean_goldstein;
    int month = 1;

    bool operator==(const IntervalFeatureRow&) const = default;
};

/// Assembles one row from a series, an interval inside it and the baseline
/// mean at the interval end. Reads nothing after `iv.end`.
inline IntervalFeatureRow make_feature_row(const DailySeries& s, const Interval& iv, double mct_bar,
                                           int interval_index, const FeatureConfig& cfg) {
    IntervalFeatureRow row;
    row.interval_index = interval_index;
    row.start_date = iv.start_date;
    row.end_date = iv.end_date;

    double sum = 0, tone = 0, gold = 0;
    int tone_n = 0, gold_n = 0;
    for (std::size_t i = iv.start; i <= iv.end; ++i) {
        sum += s.count[i];
        tone += s.tone_sum[i];
        tone_n += s.tone_n[i];
        gold += s.goldstein_sum[i];
        gold_n += s.goldstein_n[i];
    }
    row.mct = sum / static_cast<double>(iv.end - iv.start + 1);
    row.mct_bar = mct_bar;
    row.mct_bar_comp = mct_bar_comp(row.mct, row.mct_bar);
    row.theta = theta(row.mct_bar, row.mct_bar_comp, cfg.z);
    row.lags.resize(static_cast<std::size_t>(cfg.max_lag));
    for (std::size_t j = 0; j < row.lags.size(); ++j) row.lags[j] = s.count[iv.end - (j + 1)];
    if (tone_n > 0) row.mean_tone = tone / tone_n;
    if (gold_n > 0) row.mean_goldstein = gold / gold_n;
    row.month = static_cast<int>(iv.end_date.month());
    return row;
}

struct FeatureBuild {
    std::vector<IntervalFeatureRow> rows;
    std::optional<std::string> diagnostic;  // set when the series is too short
};

inline FeatureBuild build_features(const DailySeries& s, const FeatureConfig& cfg) {
    cfg.validate();
    FeatureBuild out;
    auto intervals = make_intervals(s, cfg);
    if (intervals.empty()) {
        out.diagnostic = "InsufficientHistory: " + std::to_string(s.size()) + " days, need at least " +
                         std::to_string(cfg.warm_up() + cfg.interval) + " for one interval";
        return out;
    }
    auto ma = moving_average(s.count, static_cast<std::size_t>(cfg.window));
    out.rows.reserve(intervals.size());
    for (std::size_t n = 0; n < intervals.size(); ++n)
        out.rows.push_back(make_feature_row(s, intervals[n], ma.at(intervals[n].end), static_cast<int>(n), cfg));
    return out;
}

} // namespace unrest::features
