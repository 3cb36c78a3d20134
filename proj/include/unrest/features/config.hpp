#pragma once

#include <set>

#include "unrest/core/error.hpp"

namespace unrest::features {

/// Which statistic is compared against the labeling margin.
enum class LabelStat {
    margin,            // mct - theta
    literal_mct_comp,  // mct_bar_comp, compared directly
};

struct FeatureConfig {
    int window = 90;       // moving-average length W, days
    int interval = 3;      // k, days per interval
    int max_lag = 7;       // L, daily lag columns
    double z = 2.576;      // threshold multiplier
    std::set<int> root_codes{14};
    double delta = 0.0;    // labeling margin
    LabelStat label_stat = LabelStat::margin;

    /// Days at the head of a series that cannot end an interval because the
    /// moving average or the lag columns are not yet defined.
    int warm_up() const { return window - 1 > max_lag ? window - 1 : max_lag; }

    void validate() const {
        if (interval < 3 || interval > 7) throw InvalidValue("interval must be in 3..7");
        if (max_lag < 0) throw InvalidValue("max_lag must be >= 0");
        if (window < interval) throw InvalidValue("window must be >= interval");
        if (!(z > 0)) throw InvalidValue("z must be > 0");
        if (root_codes.empty()) throw InvalidValue("root_codes must not be empty");
        for (int c : root_codes)
            if (c < 1 || c > 20) throw InvalidValue("root codes must be in 1..20");
    }
};

} // namespace unrest::features
