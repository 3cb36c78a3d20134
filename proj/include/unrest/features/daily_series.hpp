#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "unrest/core/date.hpp"
#include "unrest/features/config.hpp"
#include "unrest/ingest/event_record.hpp"

namespace unrest::features {

/// Per-day counts for one country on a gap-free date axis.
struct DailySeries {
    std::string country;
    Date first;
    std::vector<double> count;  // events whose root code is selected
    std::vector<double> tone_sum;
    std::vector<int> tone_n;
    std::vector<double> goldstein_sum;
    std::vector<int> goldstein_n;

    std::size_t size() const noexcept { return count.size(); }
    bool empty() const noexcept { return count.empty(); }
    Date date_at(std::size_t i) const { return first + static_cast<std::int32_t>(i); }
    Date last() const { return date_at(size() - 1); }

    void resize(std::size_t n) {
        count.assign(n, 0.0);
        tone_sum.assign(n, 0.0);
        tone_n.assign(n, 0);
        goldstein_sum.assign(n, 0.0);
        goldstein_n.assign(n, 0);
    }
};

/// Counts selected events per day from the first to the last record date
/// (over all records, selected or not). Tone and Goldstein accumulators
/// cover selected events whose field is present.
inline DailySeries daily_counts(std::span<const ingest::EventRecord> rows, const FeatureConfig& cfg,
                                std::string country = {}) {
    DailySeries s;
    s.country = std::move(country);
    if (rows.empty()) return s;
    auto [lo, hi] = std::minmax_element(rows.begin(), rows.end(),
                                        [](const auto& a, const auto& b) { return a.day < b.day; });
    s.first = lo->day;
    s.resize(static_cast<std::size_t>(hi->day - lo->day) + 1);
    if (s.country.empty()) s.country = rows.front().action_country;
    for (const auto& r : rows) {
        if (!cfg.root_codes.contains(r.event_root_code)) continue;
        auto i = static_cast<std::size_t>(r.day - s.first);
        s.count[i] += 1.0;
        if (r.avg_tone) {
            s.tone_sum[i] += *r.avg_tone;
            ++s.tone_n[i];
        }
        if (r.goldstein_scale) {
            s.goldstein_sum[i] += *r.goldstein_scale;
            ++s.goldstein_n[i];
        }
    }
    return s;
}

} // namespace unrest::features
