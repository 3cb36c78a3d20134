#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "unrest/core/error.hpp"
#include "unrest/features/config.hpp"

namespace unrest::synth {

// Brute-force reference labeler. Deliberately naive: every moving average is
// re-summed from scratch and nothing is shared with the feature code.

struct OracleInterval {
    int interval_index = 0;
    int start_day = 0;  // offsets into the count series, inclusive
    int end_day = 0;
    int label = 0;
};

inline std::vector<OracleInterval> oracle_labels(std::span<const int> counts, const features::FeatureConfig& cfg,
                                                 double delta) {
    const int n = static_cast<int>(counts.size());
    const int w = cfg.window;
    const int k = cfg.interval;
    if (w < 1 || k < 1) throw InvalidValue("window and interval must be positive");
    if (n < w + k) throw InsufficientHistory("oracle needs at least W + k days, got " + std::to_string(n));

    int first = w - 1;
    if (cfg.max_lag > first) first = cfg.max_lag;

    std::vector<OracleInterval> out;
    int index = 0;
    for (int start = first; start + k <= n; start += k) {
        const int end = start + k - 1;

        long long interval_total = 0;
        for (int d = start; d <= end; ++d) interval_total += counts[d];
        const double mct = static_cast<double>(interval_total) / k;

        long long window_total = 0;
        for (int d = end - w + 1; d <= end; ++d) window_total += counts[d];
        const double ma = static_cast<double>(window_total) / w;

        double comp = 0.0;
        if (ma != 0.0) comp = -mct / ma;
        const double th = comp + cfg.z * std::fabs(ma - comp);

        double statistic = mct - th;
        if (cfg.label_stat == features::LabelStat::literal_mct_comp) statistic = comp;

        OracleInterval iv;
        iv.interval_index = index++;
        iv.start_day = start;
        iv.end_day = end;
        iv.label = statistic > delta ? 1 : 0;
        out.push_back(iv);
    }
    return out;
}

inline std::string ground_truth_csv(const std::vector<OracleInterval>& labels) {
    std::string out = "interval_index,label\n";
    for (const auto& iv : labels) out += std::to_string(iv.interval_index) + "," + std::to_string(iv.label) + "\n";
    return out;
}

} // namespace unrest::synth
