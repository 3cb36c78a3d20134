#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "unrest/core/error.hpp"

namespace unrest::features {

/// Trailing means. values[j] is the mean of input[offset + j - W + 1 ..
/// offset + j]; inputs before `offset` are warm-up and have no mean.
struct TrailingMean {
    std::size_t window = 0;
    std::size_t offset = 0;
    std::vector<double> values;
    bool warm_up_only = false;  // series shorter than the window

    bool defined_at(std::size_t i) const { return i >= offset && i - offset < values.size(); }
    double at(std::size_t i) const { return values.at(i - offset); }
};

/// O(n) rolling mean. The window sum is updated with Neumaier-compensated
/// adds and recomputed from scratch every `window` steps, which keeps it
/// within a few ulps of the direct sum on long series.
inline TrailingMean moving_average(std::span<const double> xs, std::size_t window) {
    if (window == 0) throw InvalidValue("moving average window must be >= 1");
    TrailingMean out;
    out.window = window;
    out.offset = window - 1;
    if (xs.size() < window) {
        out.warm_up_only = true;
        return out;
    }
    out.values.reserve(xs.size() - window + 1);
    const double w = static_cast<double>(window);

    double sum = 0.0, comp = 0.0;
    auto add = [&](double v) {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) comp += (sum - t) + v;
        else comp += (v - t) + sum;
        sum = t;
    };
    auto resum = [&](std::size_t end) {
        sum = 0.0;
        comp = 0.0;
        for (std::size_t j = end + 1 - window; j <= end; ++j) add(xs[j]);
    };

    resum(window - 1);
    out.values.push_back((sum + comp) / w);
    for (std::size_t i = window; i < xs.size(); ++i) {
        if ((i - window + 1) % window == 0) {
            resum(i);
        } else {
            add(xs[i]);
            add(-xs[i - window]);
        }
        out.values.push_back((sum + comp) / w);
    }
    return out;
}

} // namespace unrest::features
