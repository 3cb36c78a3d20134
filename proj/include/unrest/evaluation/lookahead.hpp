#pragma once

#include <algorithm>

#include "unrest/core/error.hpp"
#include "unrest/features/daily_series.hpp"
#include "unrest/features/intervals.hpp"
#include "unrest/labeling/labeling.hpp"

namespace unrest::evaluation {

/// The part of `s` an observer standing `horizon` days before `end` could
/// know, padded out to `end` by carrying the last observed count forward.
/// Tone and Goldstein after the cutoff are unobserved (zero contributions).
/// Covers the `span` days ending at `end`.
inline features::DailySeries persistence_view(const features::DailySeries& s, std::size_t end, int horizon,
                                              std::size_t span) {
    features::DailySeries v;
    v.country = s.country;
    const std::size_t begin = end + 1 - span;
    const std::size_t cutoff = end - static_cast<std::size_t>(horizon);
    v.first = s.date_at(begin);
    v.resize(span);
    for (std::size_t i = begin; i <= end; ++i) {
        const std::size_t j = i - begin;
        if (i <= cutoff) {
            v.count[j] = s.count[i];
            v.tone_sum[j] = s.tone_sum[i];
            v.tone_n[j] = s.tone_n[i];
            v.goldstein_sum[j] = s.goldstein_sum[i];
            v.goldstein_n[j] = s.goldstein_n[i];
        } else {
            v.count[j] = s.count[cutoff];
        }
    }
    return v;
}

/// Rebuilds every row's features as known `horizon` days before its end
/// date. Labels are kept: they are still the true interval outcome.
inline labeling::LabeledDataset build_lookahead_features(const features::DailySeries& s,
                                                         const labeling::LabeledDataset& ds,
                                                         const features::FeatureConfig& cfg, int horizon) {
    if (horizon < 0) throw InvalidValue("horizon must be >= 0");
    if (horizon > cfg.max_lag)
        throw HorizonExceedsMaxLag("horizon " + std::to_string(horizon) + " > max lag " + std::to_string(cfg.max_lag));
    const std::size_t span = static_cast<std::size_t>(std::max({cfg.window, cfg.max_lag + 1, cfg.interval}));
    labeling::LabeledDataset out;
    out.country = ds.country;
    out.rows.reserve(ds.size());
    for (const auto& row : ds.rows) {
        const auto& f = row.features;
        if (s.empty() || f.start_date < s.first || f.end_date > s.last())
            throw InvalidValue("interval ending " + f.end_date.iso() + " is outside the daily series");
        const auto end = static_cast<std::size_t>(f.end_date - s.first);
        const auto start = static_cast<std::size_t>(f.start_date - s.first);
        if (end + 1 < span) throw InsufficientHistory("interval ending " + f.end_date.iso() + " lacks history");
        auto view = persistence_view(s, end, horizon, span);
        features::Interval iv{start - (end + 1 - span), span - 1, f.start_date, f.end_date};
        const double mct_bar = features::moving_average(view.count, static_cast<std::size_t>(cfg.window)).values.back();
        out.rows.push_back({features::make_feature_row(view, iv, mct_bar, f.interval_index, cfg), row.label});
    }
    return out;
}

} // namespace unrest::evaluation
