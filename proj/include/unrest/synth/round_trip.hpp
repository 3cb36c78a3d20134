#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>

#include "unrest/features/daily_series.hpp"
#include "unrest/ingest/importer.hpp"
#include "unrest/ingest/partition_store.hpp"
#include "unrest/synth/generator.hpp"

namespace unrest::synth {

struct RoundTripResult {
    bool ok = true;
    std::optional<Date> first_mismatch;
    std::string country;
    std::string detail;

    explicit operator bool() const { return ok; }
};

/// Pushes every payload through the ingest decoder and the partition store,
/// rebuilds daily counts, and compares them with the generator's counts.
inline RoundTripResult round_trip_check(const Corpus& corpus, const features::FeatureConfig& cfg = {}) {
    std::set<std::string> countries;
    for (const auto& t : corpus.truth) countries.insert(t.country);
    RoundTripResult result;
    if (countries.empty()) return result;

    ingest::PartitionStore store{fs::path{}};
    for (const auto& p : corpus.payloads) {
        auto decoded = ingest::decode_payload(p.archive, p.ref, true);
        if (decoded.status != ingest::PayloadStatus::ok || decoded.malformed != 0) {
            result.ok = false;
            result.first_mismatch = p.ref.timestamp.date;
            result.detail = "payload " + std::string(p.ref.file_name()) + " did not decode cleanly";
            return result;
        }
        store.append(decoded.records, countries);
    }

    for (const auto& t : corpus.truth) {
        const auto rows = store.collect(t.country);
        const auto series = features::daily_counts(rows, cfg, t.country);
        // Compare over the union of both date ranges; days missing on one side count as zero.
        const Date gen_end = t.start + static_cast<std::int32_t>(t.counts.size());
        Date lo = t.start;
        Date hi = gen_end;
        if (series.size() > 0) {
            lo = std::min(lo, series.first);
            hi = std::max(hi, series.first + static_cast<std::int32_t>(series.size()));
        }
        for (Date d = lo; d < hi; ++d) {
            int expected = 0;
            if (d >= t.start && d < gen_end) expected = t.counts[static_cast<std::size_t>(d - t.start)];
            int got = 0;
            if (series.size() > 0 && d >= series.first && d - series.first < static_cast<std::int32_t>(series.size()))
                got = static_cast<int>(series.count[static_cast<std::size_t>(d - series.first)]);
            if (expected != got) {
                result.ok = false;
                result.first_mismatch = d;
                result.country = t.country;
                result.detail = t.country + " " + d.iso() + ": generated " + std::to_string(expected) +
                                ", ingested " + std::to_string(got);
                return result;
            }
        }
    }
    return result;
}

inline RoundTripResult round_trip_check(const SynthSpec& spec, const features::FeatureConfig& cfg = {}) {
    return round_trip_check(generate(spec, cfg), cfg);
}

} // namespace unrest::synth
