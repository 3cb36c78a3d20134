#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "unrest/core/date.hpp"
#include "unrest/core/error.hpp"

namespace unrest::synth {

/// A burst of elevated event rate. During the `ramp_days` before `start_day`
/// the rate climbs linearly towards the full multiplier.
struct Spike {
    int start_day = 0;
    int length_days = 1;
    double multiplier = 2.0;
    int ramp_days = 0;

    int first_day() const { return start_day - ramp_days; }
    int end_day() const { return start_day + length_days; }  // exclusive
};

struct Regime {
    double mean = 0.0;
    double std = 1.0;
};

/// poisson draws each day's count; constant uses round(rate) exactly.
enum class CountModel { poisson, constant };

struct SynthSpec {
    std::string country = "PK";
    Date start_date{2015, 1, 1};
    int n_days = 0;
    double base_rate = 5.0;  // mean selected events per calm day
    CountModel count_model = CountModel::poisson;
    std::vector<Spike> spikes;
    Regime tone_calm{-2.0, 1.5};
    Regime tone_spike{-5.0, 1.5};
    Regime goldstein_calm{-3.0, 2.0};
    Regime goldstein_spike{-6.5, 1.5};
    /// Each day also carries 1 + Poisson(background_rate) events with other
    /// root codes, so every day of the span appears in the data.
    double background_rate = 1.0;
    int protest_root_code = 14;
    int min_spike_start = 97;  // W + L with the default feature settings
    std::uint64_t seed = 1;

    /// Rate multiplier in effect on `day`.
    double multiplier_on(int day) const {
        for (const auto& s : spikes) {
            if (day >= s.start_day && day < s.end_day()) return s.multiplier;
            if (day >= s.first_day() && day < s.start_day)
                return 1.0 + (s.multiplier - 1.0) * (day - s.first_day() + 1) / (s.ramp_days + 1);
        }
        return 1.0;
    }

    bool in_spike(int day) const {
        for (const auto& s : spikes)
            if (day >= s.first_day() && day < s.end_day()) return true;
        return false;
    }

    void validate() const {
        if (country.size() != 2) throw InvalidSpec("country must be a 2-letter FIPS code");
        if (n_days < 0) throw InvalidSpec("n_days must be >= 0");
        if (!(base_rate >= 0)) throw InvalidSpec("base_rate must be >= 0");
        if (!(background_rate >= 0)) throw InvalidSpec("background_rate must be >= 0");
        if (protest_root_code < 1 || protest_root_code > 20) throw InvalidSpec("root code must be in 1..20");
        auto sorted = spikes;
        std::sort(sorted.begin(), sorted.end(), [](const Spike& a, const Spike& b) { return a.start_day < b.start_day; });
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            const auto& s = sorted[i];
            if (!(s.multiplier > 1.0)) throw InvalidSpec("spike multiplier must be > 1");
            if (s.length_days < 1 || s.ramp_days < 0) throw InvalidSpec("spike length must be >= 1");
            if (s.first_day() < min_spike_start)
                throw InvalidSpec("spike at day " + std::to_string(s.start_day) + " starts inside the warm-up");
            if (s.end_day() > n_days) throw InvalidSpec("spike runs past the end of the series");
            if (i > 0 && s.first_day() < sorted[i - 1].end_day()) throw InvalidSpec("spikes overlap");
        }
    }
};

} // namespace unrest::synth
